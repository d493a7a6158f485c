"""
WDM spectrum and resonator geometry planning.

The broadband racetrack photodetector fixes the wavelength grid: its cavity
perimeter ``L_rtr`` makes consecutive resonance modes land one channel apart,
so the M carrier wavelengths are the cavity resonances for M consecutive mode
integers. Micro-ring modulator radii are then chosen per channel as the
largest ring whose free spectral range still clears the whole WDM band.

Planning steps:

1. Target perimeter from the FSR condition ``FSR = lam^2 / (n_g * L)``
   evaluated at the band center (the center, not the red edge, because the
   FSR drifts across the band and the target spacing should hold on
   average).
2. Anchor mode: round ``n_eff(lam_max) * L_target / lam_max`` to an integer,
   then recompute ``L_rtr`` so the red-edge carrier is exactly resonant.
3. Solve each carrier from the resonance condition
   ``lam = n_eff(lam) * L_rtr / m`` by fixed-point iteration for the M
   consecutive modes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainExceeded, InfeasiblePlan, InterleaveConflict, NonConvergence
from .material import MaterialModel

NM_PER_UM = 1000.0

# Fixed-point solve targets for the resonance condition.
_RESIDUAL_TARGET_NM = 1e-9
_MAX_FIXED_POINT_ITERS = 100


@dataclass(frozen=True)
class PlannerConfig:
    """
    Spectrum-planning inputs.

    Parameters
    ----------
    m : int
        Number of WDM wavelengths. Must be a power of two >= 2 so the
        1-to-M splitter tree has an integer number of stages.
    lambda_max_nm : float
        Red-edge anchor wavelength [nm].
    delta_lambda_target_nm : float
        Target channel spacing [nm].
    q_mrm : float
        Modulator quality factor used downstream for transfer models.
    """

    m: int
    lambda_max_nm: float = 1550.0
    delta_lambda_target_nm: float = 0.5
    q_mrm: float = 8000.0

    def __post_init__(self):
        if self.m < 2 or (self.m & (self.m - 1)) != 0:
            raise ValueError(f"m must be a power of two >= 2, got {self.m}")
        if self.delta_lambda_target_nm <= 0:
            raise ValueError("delta_lambda_target_nm must be positive")
        if self.q_mrm <= 0:
            raise ValueError("q_mrm must be positive")

    @property
    def splitter_stages(self) -> int:
        return int(np.log2(self.m))


@dataclass(frozen=True)
class WdmPlan:
    """
    Planned spectrum and resonator geometry.

    Fields
    ------
    lambdas_nm : ndarray[M]
        Carrier wavelengths, ascending [nm].
    spacings_nm : ndarray[M]
        Channel spacings; the last entry is the local cavity FSR at the red
        edge (there is no next channel to difference against).
    rtr_modes : ndarray[M] of int
        Racetrack resonance mode per carrier; consecutive integers,
        decreasing as wavelength increases.
    l_rtr_um : float
        Racetrack cavity perimeter [um].
    mrm_modes : ndarray[M] of int
        Ring-modulator resonance mode per channel (filled by
        :func:`plan_mrm_radii`).
    mrm_radii_um : ndarray[M]
        Ring-modulator radii [um].
    fsr_bound_radius_um : float
        Largest radius whose FSR still covers the WDM band, evaluated at the
        red edge (the loosest channel; per-channel bounds are tighter).
    """

    m: int
    lambdas_nm: np.ndarray
    spacings_nm: np.ndarray
    rtr_modes: np.ndarray
    l_rtr_um: float
    q_mrm: float
    mrm_modes: np.ndarray | None = None
    mrm_radii_um: np.ndarray | None = None
    fsr_bound_radius_um: float | None = None

    @property
    def band_nm(self) -> tuple[float, float]:
        return float(self.lambdas_nm[0]), float(self.lambdas_nm[-1])

    @property
    def total_span_nm(self) -> float:
        """Sum of all channel spacings (the band the ring FSRs must clear)."""
        return float(np.sum(self.spacings_nm))


def _solve_resonance(mode: int, l_rtr_nm: float, mat: MaterialModel, start_nm: float) -> float:
    """Fixed-point solve of lam = n_eff(lam) * L / m."""
    lam = start_nm
    for _ in range(_MAX_FIXED_POINT_ITERS):
        nxt = mat.n_eff(lam) * l_rtr_nm / mode
        if abs(nxt - lam) < _RESIDUAL_TARGET_NM:
            return nxt
        lam = nxt
    raise NonConvergence(
        f"resonance solve for mode {mode} did not reach {_RESIDUAL_TARGET_NM} nm"
    )


def plan_rtr_spectrum(cfg: PlannerConfig, mat: MaterialModel) -> WdmPlan:
    """
    Plan the carrier grid and racetrack perimeter.

    Returns a :class:`WdmPlan` with wavelengths, spacings, modes and
    perimeter filled; ring-modulator fields are left for
    :func:`plan_mrm_radii`.

    Raises
    ------
    DomainExceeded
        If the material curves do not cover the planned band (with 20%
        margin below the nominal span).
    NonConvergence
        If a resonance solve stalls.
    """
    lam_max = cfg.lambda_max_nm
    span = cfg.m * cfg.delta_lambda_target_nm
    if not mat.covers(lam_max - 1.2 * span, lam_max):
        raise DomainExceeded(
            f"material domain {mat.domain_nm} does not cover the planned band"
        )

    # FSR condition at band center -> target perimeter; anchor mode at the
    # red edge; recompute the perimeter so lam_max is exactly resonant.
    lam_center = lam_max - (cfg.m - 1) * cfg.delta_lambda_target_nm / 2.0
    l_target_nm = lam_center**2 / (mat.n_g(lam_center) * cfg.delta_lambda_target_nm)
    m_anchor = int(round(mat.n_eff(lam_max) * l_target_nm / lam_max))
    l_rtr_nm = lam_max * m_anchor / mat.n_eff(lam_max)

    modes = m_anchor + np.arange(cfg.m - 1, -1, -1)  # ascending wavelength
    lambdas = np.empty(cfg.m)
    lambdas[-1] = lam_max  # exact by construction
    for j in range(cfg.m - 2, -1, -1):
        lambdas[j] = _solve_resonance(int(modes[j]), l_rtr_nm, mat, lambdas[j + 1])

    spacings = np.empty(cfg.m)
    spacings[:-1] = np.diff(lambdas)
    spacings[-1] = lam_max**2 / (mat.n_g(lam_max) * l_rtr_nm)  # local FSR

    return WdmPlan(
        m=cfg.m,
        lambdas_nm=lambdas,
        spacings_nm=spacings,
        rtr_modes=modes.astype(int),
        l_rtr_um=l_rtr_nm / NM_PER_UM,
        q_mrm=cfg.q_mrm,
    )


def plan_mrm_radii(plan: WdmPlan, mat: MaterialModel) -> WdmPlan:
    """
    Choose per-channel ring-modulator modes and radii.

    For each channel the ring FSR ``lam^2 / (n_g * 2 pi r)`` must cover the
    whole WDM band, bounding the radius from above; the largest integer
    resonance mode under that bound fixes ``r = lam * m / (2 pi n_eff)``.

    Raises
    ------
    InfeasiblePlan
        If some channel admits no positive resonance mode under the bound.
    """
    span = plan.total_span_nm
    lam = plan.lambdas_nm
    n_eff = mat.n_eff(lam)
    n_g = mat.n_g(lam)

    bounds_nm = lam**2 / (n_g * 2.0 * np.pi * span)  # per-channel radius bound
    modes = np.floor(bounds_nm * 2.0 * np.pi * n_eff / lam).astype(int)
    if np.any(modes < 1):
        raise InfeasiblePlan(
            "no positive ring mode fits under the FSR bound; "
            "reduce the channel count or spacing"
        )
    radii_nm = lam * modes / (2.0 * np.pi * n_eff)

    lam_max = lam[-1]
    bound_at_max_nm = lam_max**2 / (mat.n_g(lam_max) * 2.0 * np.pi * span)
    return replace(
        plan,
        mrm_modes=modes,
        mrm_radii_um=radii_nm / NM_PER_UM,
        fsr_bound_radius_um=bound_at_max_nm / NM_PER_UM,
    )


def plan_mma_spectrum(plan: WdmPlan, mat: MaterialModel) -> WdmPlan:
    """
    Plan the second comb for optical matrix addition.

    Doubling the racetrack perimeter halves its FSR, so every original
    carrier stays resonant (mode 2m) and a new resonance (mode 2m - 1)
    appears one half-spacing above each carrier. The returned plan holds the
    offset comb against the doubled cavity.

    Raises
    ------
    InterleaveConflict
        If an offset wavelength lands within 10% of a half-spacing of its
        base carrier (would defeat the incoherent-detection isolation).
    """
    l2_nm = 2.0 * plan.l_rtr_um * NM_PER_UM
    offset_modes = 2 * plan.rtr_modes - 1

    # Original carriers must stay resonant on the doubled cavity.
    for lam, mode in zip(plan.lambdas_nm, plan.rtr_modes):
        residual = abs(lam - mat.n_eff(lam) * l2_nm / (2 * mode))
        if residual > 1e-3:
            raise InterleaveConflict(
                f"base carrier {lam:.3f} nm detunes {residual:.2e} nm "
                "on the doubled cavity"
            )

    offsets = np.empty(plan.m)
    for j, mode in enumerate(offset_modes):
        start = plan.lambdas_nm[j] + plan.spacings_nm[j] / 2.0
        offsets[j] = _solve_resonance(int(mode), l2_nm, mat, start)

    half = plan.spacings_nm / 2.0
    gap = offsets - plan.lambdas_nm
    if np.any(np.abs(gap) < 0.1 * half) or np.any(gap < 0):
        raise InterleaveConflict("offset comb collides with the base comb")

    spacings = np.empty(plan.m)
    spacings[:-1] = np.diff(offsets)
    spacings[-1] = offsets[-1] ** 2 / (mat.n_g(offsets[-1]) * l2_nm)
    return WdmPlan(
        m=plan.m,
        lambdas_nm=offsets,
        spacings_nm=spacings,
        rtr_modes=offset_modes.astype(int),
        l_rtr_um=l2_nm / NM_PER_UM,
        q_mrm=plan.q_mrm,
    )


@dataclass(frozen=True)
class PlanValidation:
    """Invariant residuals of a plan; reporting only, never raises."""

    missing_fields: tuple[str, ...]
    max_resonance_residual_nm: float | None = None
    min_spacing_nm: float | None = None
    modes_consecutive: bool | None = None
    fsr_margin_um: np.ndarray | None = None  # per-channel bound minus radius
    min_fsr_margin_um: float | None = None

    @property
    def ok(self) -> bool:
        return (
            not self.missing_fields
            and self.max_resonance_residual_nm is not None
            and self.max_resonance_residual_nm < 1e-6
            and self.min_spacing_nm is not None
            and self.min_spacing_nm > 0
            and bool(self.modes_consecutive)
            and (self.min_fsr_margin_um is None or self.min_fsr_margin_um >= 0)
        )


def validate_plan(plan: WdmPlan, mat: MaterialModel) -> PlanValidation:
    """Report resonance residuals, spacing, and FSR margins for a plan."""
    missing = []
    for name in ("lambdas_nm", "spacings_nm", "rtr_modes"):
        value = getattr(plan, name, None)
        if value is None or np.size(value) == 0:
            missing.append(name)
    if plan.l_rtr_um is None or plan.l_rtr_um <= 0:
        missing.append("l_rtr_um")
    if missing:
        return PlanValidation(missing_fields=tuple(missing))

    l_nm = plan.l_rtr_um * NM_PER_UM
    residuals = np.abs(
        plan.lambdas_nm - mat.n_eff(plan.lambdas_nm) * l_nm / plan.rtr_modes
    )
    consecutive = bool(np.all(np.diff(plan.rtr_modes) == -1))

    margins = None
    min_margin = None
    if plan.mrm_radii_um is not None:
        span = plan.total_span_nm
        bounds_um = (
            plan.lambdas_nm**2
            / (mat.n_g(plan.lambdas_nm) * 2.0 * np.pi * span)
            / NM_PER_UM
        )
        margins = bounds_um - plan.mrm_radii_um
        min_margin = float(np.min(margins))

    return PlanValidation(
        missing_fields=(),
        max_resonance_residual_nm=float(np.max(residuals)),
        min_spacing_nm=float(np.min(plan.spacings_nm)),
        modes_consecutive=consecutive,
        fsr_margin_um=margins,
        min_fsr_margin_um=min_margin,
    )


def export_plan_text(plan: WdmPlan) -> str:
    """Flat key-value export, one channel per line."""
    buf = io.StringIO()
    buf.write(f"m = {plan.m}\n")
    buf.write(f"l_rtr_um = {plan.l_rtr_um:.6f}\n")
    if plan.fsr_bound_radius_um is not None:
        buf.write(f"fsr_bound_radius_um = {plan.fsr_bound_radius_um:.6f}\n")
    for j in range(plan.m):
        mrm_mode = plan.mrm_modes[j] if plan.mrm_modes is not None else ""
        radius = (
            f"{plan.mrm_radii_um[j]:.6f}" if plan.mrm_radii_um is not None else ""
        )
        buf.write(
            f"channel {j:3d} lambda_nm={plan.lambdas_nm[j]:.6f} "
            f"spacing_nm={plan.spacings_nm[j]:.6f} "
            f"rtr_mode={plan.rtr_modes[j]} "
            f"mrm_mode={mrm_mode} mrm_radius_um={radius}\n"
        )
    return buf.getvalue()
