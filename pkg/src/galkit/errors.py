"""Exception hierarchy shared by every galkit module."""


class GalError(Exception):
    """Base class; ``str(type(err).__name__)`` is the CLI diagnostic token."""


class NonSymmetric(GalError, ValueError):
    pass


class NotPsd(GalError, ValueError):
    pass


class NonPositiveShape(GalError, ValueError):
    pass


class DimensionMismatch(GalError, ValueError):
    pass


class SingularSigma(GalError, ValueError):
    pass


class DomainError(GalError, ValueError):
    pass


class IncompatibleParams(GalError, ValueError):
    pass


class TooFewSamples(GalError, ValueError):
    pass


class EmptyGrid(GalError, ValueError):
    pass


class QuadratureError(GalError, RuntimeError):
    pass
