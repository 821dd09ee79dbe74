"""Exception hierarchy shared by the solver modules."""


class CMCError(Exception):
    """Base class for all errors raised by cmcgraph."""


class GeometryError(CMCError, ValueError):
    """Invalid curve/cone data or a query outside the admissible region."""


class MeshError(CMCError, ValueError):
    """Mesh generation failed (boundary too coarse, quality unreachable)."""


class ConfigError(CMCError, ValueError):
    """Malformed configuration; ``path`` names the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class HypothesisError(CMCError):
    """Existence hypotheses not satisfied and the gate was not forced."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceError(CMCError):
    """Newton or continuation failed; ``state`` carries the last good data."""

    def __init__(self, message, state=None, report=None):
        super().__init__(message)
        self.state = state
        self.report = report


class SandwichViolation(CMCError):
    """A nodewise comparison that must hold was violated."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class PreconditionError(CMCError, ValueError):
    """A documented precondition of an operation does not hold."""
