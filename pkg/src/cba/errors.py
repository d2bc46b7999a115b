"""Exception types shared across the package."""


class CbaError(Exception):
    """Base class for all errors raised by this package."""


class ConsecutiveUserTurns(CbaError):
    """Client protocol violation: two user turns in a row on one session."""


class BackendError(CbaError):
    """Base for model-backend failures; carries the profile name."""

    def __init__(self, profile_name: str, message: str):
        super().__init__(f"[{profile_name}] {message}")
        self.profile_name = profile_name


class BackendTimeout(BackendError):
    """The backend did not answer within the profile's timeout."""


class BackendUnavailable(BackendError):
    """Transport-level failure talking to the backend."""


class RouterUnavailable(CbaError):
    """Router classification could not be obtained from the backend."""


class AgentUnavailable(CbaError):
    """Agent loop aborted on a backend failure; partial trace attached."""

    def __init__(self, message: str, partial_steps: list | None = None):
        super().__init__(message)
        self.partial_steps = partial_steps or []


class EmptyIndex(CbaError):
    """Search was attempted against an index with no chunks."""


class ArtifactNotFound(CbaError):
    """No artifact with the requested id exists in the store."""


class ArtifactLoadError(CbaError):
    """Artifact fixture failed validation; nothing was loaded."""


class ConfigError(CbaError):
    """Invalid or inconsistent configuration."""


class EmptyDataset(CbaError):
    """A metric was requested over zero cases."""


class NoJudgeableCases(CbaError):
    """Pass rate was requested but no case carries a reference answer."""
