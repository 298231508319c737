"""Exception hierarchy shared by all qchaos modules."""


class QChaosError(Exception):
    """Base class for every error raised by qchaos."""


class InvalidParameter(QChaosError, ValueError):
    pass


class InvalidGeometry(QChaosError, ValueError):
    pass


class InvalidIncidence(QChaosError, ValueError):
    """Reflection requested for a direction that is not heading into the wall."""


class BoundaryMissed(QChaosError, RuntimeError):
    """No forward boundary intersection was found (indicates a geometry bug)."""


class InsufficientData(QChaosError, ValueError):
    pass


class BoxTooSmall(QChaosError, ValueError):
    pass


class ConditioningError(QChaosError, RuntimeError):
    pass


class AliasingError(QChaosError, ValueError):
    """Symbol or classical trajectory exceeds the momentum band of the grid."""


class NeedsDerivatives(QChaosError, ValueError):
    pass


class NormalizationError(QChaosError, ValueError):
    pass


class ResolutionError(QChaosError, ValueError):
    pass


class OutOfRange(InvalidParameter):
    pass
