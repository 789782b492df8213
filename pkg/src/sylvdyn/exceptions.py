"""Exception hierarchy shared by the numerical modules and the CLI."""


class SylvdynError(Exception):
    """Base class for all errors raised by :mod:`sylvdyn`."""


class DimensionError(SylvdynError, ValueError):
    pass


class NonFiniteError(SylvdynError, ValueError):
    pass


class SingularMatrixError(SylvdynError, ArithmeticError):
    pass


class ConvergenceError(SylvdynError, ArithmeticError):
    pass


class DefectiveMatrixError(SylvdynError, ArithmeticError):
    """Raised when an eigenvector basis cannot be formed."""


class DegenerateSpectrumError(SylvdynError, ValueError):
    """Raised when a distinct-eigenvalue formula meets a repeated eigenvalue."""


class ExpmOverflowError(SylvdynError, OverflowError):
    pass


class UnsupportedInitialStateError(SylvdynError, ValueError):
    pass


class NonCommutingError(SylvdynError):
    """Coupling envelopes differ in shape, so g(t1) and g(t2) need not commute."""


class NonCommutingWarning(UserWarning):
    pass


class IllConditionedWarning(UserWarning):
    pass
