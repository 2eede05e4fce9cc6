"""Exception hierarchy shared by all edgewit modules."""


class EdgewitError(Exception):
    """Base class for every error raised by this package."""


class InvalidOperatorError(EdgewitError, ValueError):
    """Matrix is not Hermitian, not a state, or has inconsistent dimensions."""


class ParameterError(EdgewitError, ValueError):
    pass


class SamplingError(EdgewitError, RuntimeError):
    pass


class PreconditionError(EdgewitError, ValueError):
    """An operation was called on an input outside its domain (e.g. a non-PPT state)."""


class RangeCriterionError(PreconditionError):
    """The product vector is not in R(rho) or its partial conjugate not in R(rho^T_B)."""


class NotAWitnessError(PreconditionError):
    """Operator takes a negative expectation value on some product vector."""


class DegenerateEdgeError(EdgewitError, ArithmeticError):
    """The product-vector infimum of P + Q^T_B is numerically indistinguishable from zero."""
