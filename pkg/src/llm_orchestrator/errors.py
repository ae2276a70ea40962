"""Exception hierarchy shared by all orchestrator modules.

Every error also derives from the builtin a caller would naturally catch, so
``except ValueError`` around config or scoring code keeps working.
"""


class OrchestratorError(Exception):
    """Base class for orchestrator errors."""


class InvalidProfileError(OrchestratorError, ValueError):
    """Weight profile has all-zero or negative coefficients, or is unknown."""


class ContractViolationError(OrchestratorError, ValueError):
    """An input violated a documented precondition (e.g. component outside [0, 1])."""


class NoHealthyServiceError(OrchestratorError, RuntimeError):
    """No candidate service can take the request."""


class ClassifierUnavailableError(OrchestratorError, RuntimeError):
    """The semantic classifier is not loaded or its service is unreachable."""


class ArtifactFormatError(OrchestratorError, ValueError):
    """A classifier artifact is truncated or has an unknown header."""


class ConflictError(OrchestratorError, ValueError):
    """A (model, backend) pair is registered twice."""


class ServiceNotFoundError(OrchestratorError, LookupError):
    """A service id is not present in the registry."""

    def __init__(self, service_id: str) -> None:
        super().__init__(f"Service '{service_id}' is not registered")
        self.service_id = service_id


class ColdStartTimeoutError(OrchestratorError, TimeoutError):
    """A cold service did not become ready within the cold-start timeout."""

    def __init__(self, service_id: str, waited: float, timeout: float) -> None:
        super().__init__(
            f"Service '{service_id}' not ready after {waited:.1f}s (timeout {timeout:.1f}s)"
        )
        self.service_id = service_id
        self.waited = waited
        self.timeout = timeout


class UpstreamError(OrchestratorError, RuntimeError):
    """An upstream backend failed, returned non-2xx, or timed out."""

    def __init__(self, service_id: str, message: str, timed_out: bool = False) -> None:
        super().__init__(f"Upstream '{service_id}' failed: {message}")
        self.service_id = service_id
        self.timed_out = timed_out


class EmptyInputError(OrchestratorError, ValueError):
    """A metric computation received no data."""


class UndefinedEfficiencyError(OrchestratorError, ValueError):
    """Efficiency is undefined for zero baseline accuracy or cost."""


class DegenerateRangeError(OrchestratorError, ValueError):
    """Min-max scaling over values that are all equal."""


class TrainingError(OrchestratorError, ValueError):
    """The labeled corpus cannot train a three-class model."""


class SimulationConfigError(OrchestratorError, ValueError):
    """The simulator was asked about a service it was not configured with."""


class UsageError(OrchestratorError, ValueError):
    """A harness operation was invoked with unusable arguments."""
