"""Exception hierarchy shared by all modules."""


class HelicityCascadeError(Exception):
    """Base class for every error raised by this package."""


class KinematicsError(HelicityCascadeError):
    pass


class KinematicallyForbidden(KinematicsError):
    """The requested outgoing direction has no physical solution.

    ``index`` is the 1-based scattering number inside a cascade, or ``None``
    for a standalone two-body solve.
    """

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"scattering {index}: {message}"
        super().__init__(message)


class ZeroMomentum(KinematicsError):
    pass


class AmplitudeError(HelicityCascadeError):
    pass


class SingularKinematics(AmplitudeError):
    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"scattering {index}: {message}"
        super().__init__(message)


class OffShellInput(AmplitudeError):
    pass


class StateError(HelicityCascadeError):
    pass


class NullState(StateError):
    pass


class UnknownLabel(StateError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class WrongDimension(StateError, ValueError):
    pass


class NumericalBreakdown(StateError, ArithmeticError):
    pass


class MixedState(StateError, ValueError):
    pass


class NoInteriorMaximum(HelicityCascadeError):
    pass


class ConfigError(HelicityCascadeError, ValueError):
    """Malformed scenario configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
