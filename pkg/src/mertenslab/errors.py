"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A requested limit exceeds the configured memory budget."""


class CheckpointError(RuntimeError):
    """A checkpoint file failed validation (digest, version, or consistency)."""


class InsufficientDataError(ValueError):
    """Too few usable samples for a statistical fit."""
