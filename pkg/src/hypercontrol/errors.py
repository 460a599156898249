"""Exception types shared by every stage of the analysis."""


class InputError(ValueError):
    """Malformed or inconsistent input. ``path`` locates the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{message} at {path}" if path else message)


class ResourceError(RuntimeError):
    """A configured size or budget cap was hit before an answer was reached."""

    def __init__(self, message, stage=None, partial=None):
        self.stage = stage
        self.partial = partial
        super().__init__(f"[{stage}] {message}" if stage else message)


class IncompleteClosureError(ResourceError):
    """Raised when a budget-truncated Lie basis is asked for a classification."""
