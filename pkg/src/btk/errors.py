"""Exception hierarchy.  Every error carries a stable ``code`` string."""


class BTKError(Exception):
    code = "ERROR"

    def __init__(self, message=""):
        super().__init__(message or self.code)


class ParseError(BTKError, ValueError):
    code = "PARSE_ERROR"


class NegativeValuation(BTKError, ValueError):
    code = "NEGATIVE_VALUATION"


class DivisionByZero(BTKError, ZeroDivisionError):
    code = "DIVISION_BY_ZERO"


class SingularMatrix(BTKError, ValueError):
    code = "SINGULAR_MATRIX"


class NotInSubgroup(BTKError, ValueError):
    """Raised when an operation's input is outside its required subgroup.

    The code names the subgroup, e.g. ``NOT_IN_B`` or ``NOT_IN_I``.
    """

    def __init__(self, subgroup, message=""):
        self.code = f"NOT_IN_{subgroup}"
        super().__init__(message or self.code)


class ZeroVector(BTKError, ValueError):
    code = "ZERO_VECTOR"


class EqualEnds(BTKError, ValueError):
    code = "EQUAL_ENDS"


class NotDistinct(BTKError, ValueError):
    code = "NOT_DISTINCT"


class DistanceMismatch(BTKError, ValueError):
    code = "DISTANCE_MISMATCH"


class VertexNotOnApartment(BTKError, ValueError):
    code = "VERTEX_NOT_ON_APARTMENT"


class DomainTooSmall(BTKError, ValueError):
    code = "DOMAIN_TOO_SMALL"


class RadiusTooSmall(BTKError, ValueError):
    code = "RADIUS_TOO_SMALL"


class CapacityError(BTKError, ValueError):
    code = "CAPACITY"


class InvalidLocalAut(BTKError, ValueError):
    code = "INVALID_LOCAL_AUT"


class UnknownSuite(BTKError, ValueError):
    code = "UNKNOWN_SUITE"


class InternalError(BTKError, RuntimeError):
    """A computed witness failed its own post-check."""

    code = "INTERNAL"
