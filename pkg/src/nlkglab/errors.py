"""Exception types shared across the package."""


class NlkgError(Exception):
    """Base class for all package errors."""


class GridMismatchError(NlkgError):
    """Operands live on different grids."""


class UnsupportedOperationError(NlkgError):
    """Operation not defined for this grid or configuration."""


class DegenerateInputError(NlkgError):
    """Input sits on a boundary case the algorithms refuse to decide."""


class GenericityError(NlkgError):
    """Frequency vector fails the non-resonance conditions."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"genericity check failed: {report.summary()}")


class SingularSolveError(NlkgError):
    """Linear solve at (or too close to) a spectral point."""


class ChainError(NlkgError):
    """Darboux chain construction failed."""


class ProfileError(NlkgError):
    """Profile recursion hit an inconsistent state."""


class ModulationError(NlkgError):
    """Newton iteration for the modulation decomposition did not converge."""


class BlowUpError(NlkgError):
    """Non-finite values appeared during time integration."""

    def __init__(self, t):
        self.t = t
        super().__init__(f"non-finite field values at t={t:.6g}")


class ScenarioError(NlkgError):
    """Scenario file is malformed or violates an invariant."""


class BoxOverflowError(NlkgError):
    """Exponential weight overflows on this box; shrink the half-width."""
