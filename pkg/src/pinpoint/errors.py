"""Exception types shared across the engine."""


class PinpointError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(PinpointError):
    """Invalid generation or game configuration."""


class SamplingError(PinpointError):
    """The world cannot satisfy the requested item sample."""


class FormatError(PinpointError):
    """A file failed to parse or violated its schema."""


class ContractError(PinpointError):
    """An operation was called outside its contract."""


class ScoringError(PinpointError):
    """Question scoring could not be carried out."""


class PoolExhausted(PinpointError):
    """Every question in the pool has been asked."""


class DegenerateUpdateError(PinpointError):
    """A belief update produced an all-zero posterior."""


class ModelUnavailableError(PinpointError):
    """An external answer model did not respond."""


class ProtocolError(PinpointError):
    """An external answer model replied with malformed data."""


class ValidationError(PinpointError):
    """A human-supplied response was rejected."""

    def __init__(self, message, allowed=None):
        super().__init__(message)
        self.allowed = list(allowed) if allowed is not None else None
