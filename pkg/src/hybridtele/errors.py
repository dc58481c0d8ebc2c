"""Exception hierarchy for hybridtele."""


class HybridTeleError(Exception):
    """Base class for all hybridtele errors."""


class ShapeMismatchError(HybridTeleError, ValueError):
    """Two states or operators live on different truncated spaces."""


class CutoffError(HybridTeleError, ValueError):
    """The photon-number cutoff is too small for the requested state or operation."""


class ProbabilityError(HybridTeleError, ValueError):
    """A computed probability lies outside [0, 1] beyond roundoff."""


class BasisError(HybridTeleError, ValueError):
    """A qubit carries the wrong basis tag for the requested operation."""


class GammaSolveError(HybridTeleError, ValueError):
    """No demodulation amplitude satisfies the ratio condition in the search bracket."""


class ConfigError(HybridTeleError, ValueError):
    """A sweep configuration value is malformed or out of range."""
