"""Exception types shared across the package."""


class SiphsimError(Exception):
    """Base class for all siphsim errors."""


class DomainExceeded(SiphsimError):
    """A wavelength left the domain of the material index curves."""


class NonConvergence(SiphsimError):
    """An iterative solve failed to reach its residual target."""


class InfeasiblePlan(SiphsimError):
    """No resonator geometry satisfies the spectral constraints."""


class InterleaveConflict(SiphsimError):
    """An interleaved comb wavelength collides with the base comb."""


class CalibrationFailure(SiphsimError):
    """Level selection could not linearize the transfer to the target bound."""

    def __init__(self, message, best_inl=None, best_dnl=None):
        super().__init__(message)
        self.best_inl = best_inl
        self.best_dnl = best_dnl


class DimensionMismatch(SiphsimError):
    """Operand shapes are inconsistent."""


class UncalibratedDevice(SiphsimError):
    """A device-fidelity run was requested before calibration tables exist."""


class GainSpreadExceeded(SiphsimError):
    """Row-to-row gain of the analog chain disagrees beyond tolerance."""


class ZeroDiagonal(SiphsimError):
    """Matrix inversion requires a nonzero diagonal."""


class PlanMissing(SiphsimError):
    """The requested operation needs a spectrum plan that was not built."""


class RankDeficient(SiphsimError):
    """A sampled channel matrix is rank deficient; resample."""


class ConfigError(SiphsimError):
    """Invalid or unknown experiment-configuration key."""
