"""Exception types raised across the package."""


class HminError(ValueError):
    """Base class for invalid-input errors."""


class NotHermitian(HminError):
    pass


class NotPSD(HminError):
    pass


class NotUnitary(HminError):
    pass


class DimensionMismatch(HminError):
    pass


class InvalidDimension(HminError):
    pass


class WrongDimension(HminError):
    """Raised by 2 x n closed forms when subsystem a is not a qubit."""


class InvalidSchmidt(HminError):
    pass


class InvalidRank(HminError):
    pass


class OutOfRange(HminError):
    pass


class NoConvergence(RuntimeError):
    pass
