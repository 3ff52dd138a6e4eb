"""Exception hierarchy shared across the package."""


class ChildTTSError(Exception):
    """Base class for all package-specific errors."""


class CorpusError(ChildTTSError):
    """Manifest or corpus contents violate an invariant."""


class NormalizationError(ChildTTSError):
    """Text could not be normalized (e.g. empty result, number out of range)."""


class AudioError(ChildTTSError):
    """Audio file unreadable or in an unsupported format."""


class CheckpointError(ChildTTSError):
    """Checkpoint file corrupt, truncated, or of an unsupported version."""


class TrainingDivergedError(ChildTTSError):
    """Training loss became non-finite."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite loss at step {step}")


class AdapterError(ChildTTSError):
    """External adapter command failed or produced unusable output."""


class ConfigError(ChildTTSError):
    """Run configuration invalid (unknown key, bad type, out-of-range value)."""


class MissingArtifactError(ChildTTSError):
    """A pipeline stage requires an artifact an earlier stage has not produced."""
