"""Exception types shared across the package."""


class DegenerateGeometryError(ValueError):
    """Two distinct buoys occupy the same position."""


class NumericalSolveError(RuntimeError):
    """The frequency-domain system is singular or too ill-conditioned to trust."""

    def __init__(self, message: str, omega: float | None = None, beta: float | None = None):
        super().__init__(message)
        self.omega = omega
        self.beta = beta


class ScenarioFormatError(ValueError):
    """A wave-scenario file failed to parse or violates an invariant."""


class BoundsError(ValueError):
    """A buoy position lies outside the farm area."""


class BudgetExhaustedError(RuntimeError):
    """The evaluation budget has been spent."""


class PlacementInfeasibleError(RuntimeError):
    """A search sector admits no sample inside the farm."""


class DegenerateLandscapeError(ValueError):
    """The surrogate power table is flat; no sector can be extracted."""


class ConfigurationError(ValueError):
    """Unknown method, refiner or otherwise invalid run configuration."""
