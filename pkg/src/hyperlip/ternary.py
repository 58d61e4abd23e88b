"""Signed ternary digits for translates of the middle-third Cantor set.

A shift ``alpha`` in (0, 1) is written as ``sum alpha_n 3^-n`` with digits
in {-2, 0, 2}.  Such a digit stream is what decides which cells of
``C`` and ``C + alpha`` meet.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Iterator, Sequence, Tuple

from .errors import DualExpansionNotSupported, InvalidArgument

DIGITS = (-2, 0, 2)


@dataclass(frozen=True)
class SignedTernary:
    preperiod: Tuple[int, ...]
    period: Tuple[int, ...]
    dual: bool

    def digits(self) -> Iterator[int]:
        yield from self.preperiod
        while True:
            yield from self.period

    def digit(self, n: int) -> int:
        """The 1-based ``n``-th digit."""
        if n <= len(self.preperiod):
            return self.preperiod[n - 1]
        return self.period[(n - len(self.preperiod) - 1) % len(self.period)]

    def prefix(self, n: int) -> Tuple[int, ...]:
        return tuple(islice(self.digits(), n))

    def value(self) -> Fraction:
        head = sum((Fraction(d, 3 ** (i + 1)) for i, d in enumerate(self.preperiod)), Fraction(0))
        m = len(self.period)
        cycle = sum((Fraction(d, 3 ** (i + 1)) for i, d in enumerate(self.period)), Fraction(0))
        tail = cycle / (1 - Fraction(1, 3 ** m))
        return head + tail / 3 ** len(self.preperiod)


def _is_dual(alpha: Fraction) -> bool:
    # alpha = sum_{n<=k} a_n 3^-n ± 3^-k  <=>  alpha = odd / 3^k
    den = alpha.denominator
    while den % 3 == 0:
        den //= 3
    return den == 1 and alpha.numerator % 2 == 1


def signed_ternary_expand(alpha) -> SignedTernary:
    """Greedy expansion: each digit keeps the scaled remainder in [-1, 1].

    Ties are broken toward 0, so ``1/3`` expands as ``0, 2, 2, ...``.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise InvalidArgument(f"alpha must lie in (0, 1), got {alpha}")
    seen = {}
    digits = []
    x = alpha
    while x not in seen:
        seen[x] = len(digits)
        y = 3 * x
        d = min(DIGITS, key=lambda c: (abs(y - c), abs(c)))
        digits.append(d)
        x = y - d
    start = seen[x]
    return SignedTernary(tuple(digits[:start]), tuple(digits[start:]), _is_dual(alpha))


def alpha_edge(word_i: Sequence[int], word_j: Sequence[int], expansion: SignedTernary) -> bool:
    """Whether ``I_i`` meets ``I_j + alpha``: digitwise ``i_k - j_k = alpha_k``."""
    if expansion.dual:
        raise DualExpansionNotSupported(
            "alpha has two expansions; decompose the union into translates instead")
    if len(word_i) != len(word_j):
        raise InvalidArgument("words must have equal length")
    for k, (a, b) in enumerate(zip(word_i, word_j), start=1):
        if a not in (0, 2) or b not in (0, 2):
            raise InvalidArgument("Cantor words use the symbols 0 and 2")
        if a - b != expansion.digit(k):
            return False
    return True
