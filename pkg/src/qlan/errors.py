"""Exception hierarchy shared by every module."""


class QlanError(ValueError):
    """Base class for all validation and domain errors raised by qlan."""


class NotHermitian(QlanError):
    pass


class NotUnitTrace(QlanError):
    pass


class NotPSD(QlanError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"smallest eigenvalue {min_eigenvalue:.3e} is below tolerance")
        self.min_eigenvalue = min_eigenvalue


class NotPOVM(QlanError):
    pass


class NegativeProbability(QlanError):
    pass


class DimensionMismatch(QlanError):
    pass


class GapTooSmall(QlanError):
    pass


class DiagonalOutOfRange(QlanError):
    pass


class NotLocal(QlanError):
    pass


class UnsupportedDimension(QlanError):
    pass


class LengthMismatch(QlanError):
    pass


class IndexMismatch(QlanError):
    pass


class NotSPD(QlanError):
    pass


class DegenerateFunctional(QlanError):
    pass


class TooLarge(QlanError):
    pass


class NotSemistandard(QlanError):
    pass
