"""Exception types shared across the package."""


class TrapdoorError(Exception):
    """Base class for all package errors."""


class KeyGenError(TrapdoorError):
    pass


class FactoringError(TrapdoorError):
    pass


class DecodeError(TrapdoorError, ValueError):
    """A packed example string does not decode to a valid payload."""


class InconsistentSampleError(TrapdoorError, ValueError):
    pass


class MissingProvenanceError(TrapdoorError, ValueError):
    pass


class SearchBudgetExceeded(TrapdoorError):
    """An exhaustive oracle would exceed its configured budget."""


class InfeasibleModelError(TrapdoorError):
    pass


class VerificationError(TrapdoorError):
    """A verifier rejected an intermediate or final result."""


class StageError(TrapdoorError):
    """Wraps an error raised inside one pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
