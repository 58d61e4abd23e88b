"""Lipschitz-equivalence certificates for self-similar sets via augmented trees."""

from .augtree import (
    LeveledGraph, build_explicit, build_from_ifs, build_union_from_ifs, geodesic, gromov_product,
    telescope)
from .classes import classify, verify_eigen
from .errors import HyperlipError
from .geometry import Similitude, SimilitudeSystem, condition_h_margin
from .matstruct import frobenius_form, is_primitive, lemma41_exponent, period
from .neariso import sigma_general, sigma_primitive, sigma_union, verify_distortion
from .rearrange import power_rearrange, quasi_power_rearrange, solve_quasi, solve_rearrange

__version__ = "0.1.0"
