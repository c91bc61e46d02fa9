"""Exception hierarchy shared by every module."""


class PolarLouvainError(Exception):
    """Base class for all library errors."""


class ContractViolation(PolarLouvainError, ValueError):
    """An argument broke a documented precondition."""


class EdgeListError(PolarLouvainError):
    """Malformed edge-list input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RejectedEdgeError(EdgeListError):
    """An edge that is syntactically fine but not allowed (self-loops)."""


class EmptyGraphError(PolarLouvainError):
    pass


class MembershipError(PolarLouvainError):
    """Membership table does not line up with the graph."""

    def __init__(self, message, missing=(), extra=()):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        super().__init__(message)


class DegenerateMeasureError(PolarLouvainError):
    """A capacity matrix would need a zero normalizer."""


class DegeneratePolarizationError(DegenerateMeasureError):
    pass


class DegenerateDialogueError(DegenerateMeasureError):
    pass


class UndefinedScoreError(PolarLouvainError):
    """pol(P) needs at least one community with more than one member."""


class UndefinedModularityError(PolarLouvainError):
    pass


class SizeLimitError(PolarLouvainError):
    """Brute-force Shapley requested on too many players."""
