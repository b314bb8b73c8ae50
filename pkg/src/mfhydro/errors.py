"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(ValueError):
    """Mismatched array lengths or otherwise inconsistent call."""


class IllPosedGeometryError(RuntimeError):
    """Node geometry makes a shape-function construction singular."""

    def __init__(self, message, node_index=None):
        super().__init__(message)
        self.node_index = node_index


class StateCorruptionError(RuntimeError):
    """Particle state violates a physical invariant (e.g. rho <= 0)."""


class StepFailureError(RuntimeError):
    """Time integration could not produce a valid step."""


class VacuumError(RuntimeError):
    """Riemann initial data generate a vacuum region."""
