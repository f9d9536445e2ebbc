"""Exception hierarchy shared by every module."""


class UavTrackError(Exception):
    """Base class; ``agent_id`` is set when the failure belongs to one UAV."""

    def __init__(self, message: str = "", agent_id: int | None = None):
        super().__init__(message)
        self.agent_id = agent_id

    def __str__(self) -> str:
        msg = super().__str__()
        if self.agent_id is not None:
            return f"agent {self.agent_id}: {msg}"
        return msg


class DepthNonPositive(UavTrackError):
    pass


class NonFiniteState(UavTrackError):
    pass


class DepthCollapse(UavTrackError):
    pass


class CovarianceNotPD(UavTrackError):
    pass


class SingularInteraction(UavTrackError):
    pass


class CoincidentAgents(UavTrackError):
    pass


class DegenerateAzimuth(UavTrackError):
    pass


class ConfigError(UavTrackError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass
