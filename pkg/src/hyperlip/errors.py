"""Exception hierarchy shared by all hyperlip modules.

Every error carries a short machine-readable ``code`` that the command
line surfaces in its JSON error reports.
"""


class HyperlipError(Exception):
    code = "error"


class InvalidArgument(HyperlipError, ValueError):
    code = "invalid_argument"


class InvalidWord(HyperlipError, ValueError):
    code = "invalid_word"


class InvalidSystem(HyperlipError, ValueError):
    code = "invalid_system"


class UndecidedIntersection(HyperlipError):
    code = "undecided_intersection"

    def __init__(self, first, second, depth=None):
        self.pair = (first, second)
        msg = f"intersection of cells {first!r} and {second!r} undecided"
        if depth is not None:
            msg += f" after {depth} refinements"
        super().__init__(msg)


class ClosureViolation(HyperlipError):
    code = "closure_violation"


class InsufficientDepth(HyperlipError):
    code = "insufficient_depth"


class CapExceeded(HyperlipError):
    code = "cap_exceeded"


class NotIrreducible(HyperlipError):
    code = "not_irreducible"


class NotPrimitive(HyperlipError):
    code = "not_primitive"


class EigenMismatch(HyperlipError):
    code = "eigen_mismatch"


class GcdDoesNotDivide(HyperlipError):
    code = "gcd_does_not_divide"


class DualExpansionNotSupported(HyperlipError):
    code = "dual_expansion"


class DivisibilityViolation(HyperlipError):
    code = "divisibility_violation"


class RearrangeFailed(HyperlipError):
    code = "rearrange_failed"


class QuasiRearrangeFailed(HyperlipError):
    code = "quasi_rearrange_failed"


class NotSimple(HyperlipError):
    code = "not_simple"


class CapacityViolation(HyperlipError):
    code = "capacity_violation"


class ParseError(HyperlipError):
    """Configuration error with an optional 1-based source location."""

    code = "parse_error"

    def __init__(self, message, line=None, column=None, path=None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: "
        super().__init__(where + message)
