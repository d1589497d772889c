from __future__ import annotations

__all__ = [
    "EFRLError",
    "ConfigurationError",
    "BlowUpError",
    "GridMismatchError",
    "SnapshotFormatError",
    "CheckpointError",
]


class EFRLError(Exception):
    pass


class ConfigurationError(EFRLError):
    pass


class BlowUpError(EFRLError):
    """Raised when a non-finite field reaches a transform, or a DNS diverges."""

    def __init__(self, message: str, time: float | None = None, step: int | None = None):
        super().__init__(message)
        self.time = time
        self.step = step


class GridMismatchError(EFRLError, ValueError):
    pass


class SnapshotFormatError(EFRLError):
    pass


class CheckpointError(EFRLError):
    pass
