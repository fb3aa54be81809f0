"""Exception types shared across the package."""


class GepoError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GepoError, ValueError):
    """A configuration value is outside its documented range."""


class InvalidEmbeddingError(GepoError, ValueError):
    """An embedding provider produced a zero-norm vector."""


class ProviderInconsistencyError(GepoError, ValueError):
    """An embedding's dimension disagrees with the vectors already stored."""


class EmptyTrajectoryError(GepoError, ValueError):
    """A trajectory with no steps was passed where at least one is required."""


class EmptyGroupError(GepoError, ValueError):
    """An empty trajectory group was passed to a group statistic."""


class ShapeMismatchError(GepoError, ValueError):
    """Two per-step arrays that must align have different lengths."""


class RevisionMismatchError(GepoError, RuntimeError):
    """A centrality snapshot is stale relative to the graph it is used with."""


class NonConvergenceError(GepoError, RuntimeError):
    """Power iteration failed to converge within the iteration cap."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NumericFailureError(GepoError, ArithmeticError):
    """A non-finite intermediate appeared in the loss computation."""

    def __init__(self, message: str, timestep: int):
        super().__init__(message)
        self.timestep = timestep


class EpisodeFinishedError(GepoError, RuntimeError):
    """step() was called on an episode that already terminated."""


class ActionError(GepoError, ValueError):
    """An action id outside the environment's action set was supplied."""
