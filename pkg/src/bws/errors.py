"""Exception hierarchy shared by all modules."""


class BwsError(Exception):
    """Base class for library errors."""


class NotSpd(BwsError, ValueError):
    """A matrix that must be symmetric positive-definite is not."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DimMismatch(BwsError, ValueError):
    pass


class OutOfDomain(BwsError, ValueError):
    """A parameter falls outside the open interval where the result is SPD.

    Attributes
    ----------
    eigenvalue : float or None
        The offending eigenvalue (of ``I + t L_C[V]`` or similar).
    interval : Interval or None
        The admissible open interval.
    """

    def __init__(self, message, eigenvalue=None, interval=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.interval = interval


class Singular(BwsError, ValueError):
    pass


class LiftMismatch(BwsError, ValueError):
    pass


class IndexOutOfRange(BwsError, IndexError):
    pass


class SingularMetric(BwsError, ArithmeticError):
    pass


class CallbackFailure(BwsError, RuntimeError):
    pass


class NonFiniteSample(BwsError, ArithmeticError):
    pass


class NonFinite(BwsError, ArithmeticError):
    pass
