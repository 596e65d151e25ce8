"""Exception types shared across the package."""


class IonDiracError(Exception):
    pass


class InvalidTruncation(IonDiracError, ValueError):
    """Fock cutoff out of range, or a state that does not fit its cutoff."""


class InvalidParameter(IonDiracError, ValueError):
    pass


class InvalidPair(IonDiracError, ValueError):
    pass


class SpaceMismatch(IonDiracError, ValueError):
    pass


class NotHermitian(IonDiracError, ValueError):
    pass


class ConvergenceError(IonDiracError, RuntimeError):
    pass


class InsufficientSampling(IonDiracError, ValueError):
    pass


class ConfigError(IonDiracError, ValueError):
    pass
