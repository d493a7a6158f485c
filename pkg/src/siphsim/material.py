"""
Waveguide dispersion data: effective and group index versus wavelength.

Both indices are carried as independent piecewise-linear curves sampled on a
common wavelength grid. They are treated as measured data, not derived from
one another: published endpoint values are rounded coarsely enough that a
group index reconstructed from the effective-index slope can disagree with
the published one by several percent. ``consistency_report`` quantifies the
disagreement for curves where it matters.

``material_from_band`` builds a self-consistent pair from band-edge anchor
values by fitting a quadratic ``n_eff``; its implied group index
``n_g = n_eff - lam * d(n_eff)/d(lam)`` is then exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainExceeded


@dataclass(frozen=True)
class MaterialModel:
    """
    Piecewise-linear index curves over a wavelength domain.

    Parameters
    ----------
    wavelengths_nm : ndarray
        Ascending sample grid [nm].
    n_eff_values : ndarray
        Effective refractive index at each grid point.
    n_g_values : ndarray
        Group index at each grid point.

    Notes
    -----
    Invariants enforced at construction: the grid is strictly ascending and
    covers at least [1180, 1550] nm, and ``n_g > n_eff > 1`` everywhere.
    """

    wavelengths_nm: np.ndarray
    n_eff_values: np.ndarray
    n_g_values: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.wavelengths_nm, dtype=float)
        ne = np.asarray(self.n_eff_values, dtype=float)
        ng = np.asarray(self.n_g_values, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise ValueError("need at least two wavelength samples")
        if not (lam.shape == ne.shape == ng.shape):
            raise ValueError("curve arrays must share the wavelength grid")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("wavelength grid must be strictly ascending")
        if lam[0] > 1180.0 or lam[-1] < 1550.0:
            raise ValueError(
                f"curves must cover [1180, 1550] nm, got [{lam[0]}, {lam[-1]}]"
            )
        if not np.all(ne > 1.0):
            raise ValueError("n_eff must exceed 1 everywhere")
        if not np.all(ng > ne):
            raise ValueError("n_g must exceed n_eff everywhere")
        object.__setattr__(self, "wavelengths_nm", lam)
        object.__setattr__(self, "n_eff_values", ne)
        object.__setattr__(self, "n_g_values", ng)

    @property
    def domain_nm(self) -> tuple[float, float]:
        """Wavelength domain covered by the curves [nm]."""
        return float(self.wavelengths_nm[0]), float(self.wavelengths_nm[-1])

    def _check_domain(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        lo, hi = self.domain_nm
        if np.any(lam < lo - 1e-9) or np.any(lam > hi + 1e-9):
            raise DomainExceeded(
                f"wavelength outside material domain [{lo}, {hi}] nm"
            )
        return lam

    def n_eff(self, lam_nm):
        """Effective index at ``lam_nm`` (scalar or array)."""
        lam = self._check_domain(lam_nm)
        out = np.interp(lam, self.wavelengths_nm, self.n_eff_values)
        return float(out) if np.isscalar(lam_nm) else out

    def n_g(self, lam_nm):
        """Group index at ``lam_nm`` (scalar or array)."""
        lam = self._check_domain(lam_nm)
        out = np.interp(lam, self.wavelengths_nm, self.n_g_values)
        return float(out) if np.isscalar(lam_nm) else out

    def covers(self, lo_nm: float, hi_nm: float) -> bool:
        """True when [lo, hi] nm lies inside the curve domain."""
        dlo, dhi = self.domain_nm
        return dlo <= lo_nm and hi_nm <= dhi

    def consistency_report(self, lo_nm: float, hi_nm: float, samples: int = 64):
        """
        Compare the stored group index against the one implied by n_eff.

        Returns the maximum relative deviation of
        ``n_eff - lam * d(n_eff)/d(lam)`` from the stored ``n_g`` over
        [lo, hi]. Large values flag curves whose rounding makes them
        mutually inconsistent.
        """
        lam = np.linspace(lo_nm, hi_nm, samples)
        ne = self.n_eff(lam)
        dne = np.gradient(ne, lam)
        ng_implied = ne - lam * dne
        ng = self.n_g(lam)
        return float(np.max(np.abs(ng_implied - ng) / ng))


def material_from_band(
    band_lo_nm: float,
    band_hi_nm: float,
    n_g_lo: float,
    n_g_hi: float,
    n_eff_hi: float,
    domain_lo_nm: float = 1180.0,
    domain_hi_nm: float = 1555.0,
    step_nm: float = 0.5,
) -> MaterialModel:
    """
    Build mutually consistent index curves from band-edge anchors.

    Fits ``n_eff(lam) = c0 + c1*lam + c2*lam**2`` such that the implied group
    index ``n_g(lam) = c0 - c2*lam**2`` matches ``n_g_lo``/``n_g_hi`` at the
    band edges and ``n_eff`` matches ``n_eff_hi`` at the red edge. The fit is
    sampled onto a dense grid over [domain_lo, domain_hi] nm.

    Parameters
    ----------
    band_lo_nm, band_hi_nm : float
        Blue and red edges of the operating band [nm].
    n_g_lo, n_g_hi : float
        Group index at the blue and red band edges.
    n_eff_hi : float
        Effective index at the red band edge.
    """
    if band_hi_nm <= band_lo_nm:
        raise ValueError("band_hi_nm must exceed band_lo_nm")
    c2 = (n_g_lo - n_g_hi) / (band_hi_nm**2 - band_lo_nm**2)
    c0 = n_g_hi + c2 * band_hi_nm**2
    c1 = (n_eff_hi - c0 - c2 * band_hi_nm**2) / band_hi_nm
    lam = np.arange(domain_lo_nm, domain_hi_nm + step_nm / 2, step_nm)
    if lam[-1] < band_hi_nm:
        lam = np.append(lam, band_hi_nm)
    n_eff = c0 + c1 * lam + c2 * lam**2
    n_g = c0 - c2 * lam**2
    return MaterialModel(lam, n_eff, n_g)


# C-band anchors for the 45-nm SOI platform. The red-edge effective index is
# kept unrounded at 3.73115: the published two-decimal value (3.73) rounds
# away the digit that fixes which cavity mode lands on 1550 nm.
SOI_BAND_LO_NM = 1534.5
SOI_BAND_HI_NM = 1550.0
SOI_N_G_LO = 5.02
SOI_N_G_HI = 4.98
SOI_N_EFF_HI = 3.73115


def default_silicon_material() -> MaterialModel:
    """Default C-band SOI dispersion curves (0.5 nm channel-grid design)."""
    return material_from_band(
        SOI_BAND_LO_NM, SOI_BAND_HI_NM, SOI_N_G_LO, SOI_N_G_HI, SOI_N_EFF_HI
    )


def wide_band_silicon_material() -> MaterialModel:
    """SOI dispersion variant anchored over 1519-1550 nm (1 nm grid design)."""
    return material_from_band(1519.0, 1550.0, 5.06, 4.98, SOI_N_EFF_HI)
