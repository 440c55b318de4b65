"""Exception hierarchy shared by every module of the package."""


class BarrierTimesError(Exception):
    """Base class for all errors raised by barrier_times."""


class DomainError(BarrierTimesError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class RegimeError(DomainError):
    """The momentum is outside the tunneling regime 0 < k < w."""


class ConfigurationError(BarrierTimesError, ValueError):
    """A packet, grid or run configuration is inconsistent."""


class MeasurementError(BarrierTimesError, RuntimeError):
    """An observable could not be extracted from a propagation history."""


class InstabilityError(BarrierTimesError, RuntimeError):
    """The propagation lost norm beyond the abort threshold."""
