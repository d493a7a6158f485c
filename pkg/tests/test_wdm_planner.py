"""
Spectrum-planner checks against the three reference design rows
(dimension / spacing / material -> perimeter, modes, radii) and the module
invariants.
"""

import numpy as np
import pytest

from siphsim.errors import DomainExceeded, InfeasiblePlan, InterleaveConflict
from siphsim.material import default_silicon_material, wide_band_silicon_material
from siphsim.wdm import (
    PlannerConfig,
    WdmPlan,
    export_plan_text,
    plan_mma_spectrum,
    plan_mrm_radii,
    plan_rtr_spectrum,
    validate_plan,
)

# (m, spacing_nm, material, L_ref_um, mode_hi, mode_lo, r_lo_um, r_hi_um, mrm_modes)
REFERENCE_ROWS = [
    (32, 0.5, "default", 951.32, 2321, 2290, 4.63, 4.76, {71, 72}),
    (32, 1.0, "wide", 469.01, 1160, 1129, 2.25, 2.38, {35, 36}),
    (16, 1.0, "default", 475.66, 1160, 1145, 4.63, 4.76, {71, 72}),
]


def _mat(name):
    return default_silicon_material() if name == "default" else wide_band_silicon_material()


@pytest.mark.parametrize(
    "m,spacing,mat_name,l_ref,mode_hi,mode_lo,r_lo,r_hi,mrm_set", REFERENCE_ROWS
)
def test_reference_rows(m, spacing, mat_name, l_ref, mode_hi, mode_lo, r_lo, r_hi, mrm_set):
    mat = _mat(mat_name)
    plan = plan_rtr_spectrum(
        PlannerConfig(m=m, delta_lambda_target_nm=spacing), mat
    )
    assert plan.l_rtr_um == pytest.approx(l_ref, rel=0.01)
    assert abs(int(plan.rtr_modes[0]) - mode_hi) <= 1
    assert abs(int(plan.rtr_modes[-1]) - mode_lo) <= 1
    assert len(plan.lambdas_nm) == m

    plan = plan_mrm_radii(plan, mat)
    assert plan.mrm_radii_um.min() == pytest.approx(r_lo, rel=0.02)
    assert plan.mrm_radii_um.max() == pytest.approx(r_hi, rel=0.02)
    assert set(np.unique(plan.mrm_modes)) <= mrm_set


def test_row1_span_and_spacings():
    mat = default_silicon_material()
    plan = plan_rtr_spectrum(PlannerConfig(m=32, delta_lambda_target_nm=0.5), mat)
    assert plan.lambdas_nm[-1] == pytest.approx(1550.0, abs=1e-9)
    assert plan.lambdas_nm[0] == pytest.approx(1534.5, abs=0.3)
    assert plan.spacings_nm.min() == pytest.approx(0.49, abs=0.005)
    assert plan.spacings_nm.max() == pytest.approx(0.51, abs=0.005)


def test_resonance_residuals_below_bound(silicon, plan32):
    l_nm = plan32.l_rtr_um * 1000.0
    residual = np.abs(
        plan32.lambdas_nm
        - silicon.n_eff(plan32.lambdas_nm) * l_nm / plan32.rtr_modes
    )
    assert residual.max() < 1e-6


def test_modes_consecutive_decreasing(plan32):
    assert np.all(np.diff(plan32.rtr_modes) == -1)


def test_fsr_condition_consistency(silicon, plan32):
    # Realized spacing must track lam^2/(n_g L) within 5%.
    lam = plan32.lambdas_nm[:-1]
    fsr = lam**2 / (silicon.n_g(lam) * plan32.l_rtr_um * 1000.0)
    realized = np.diff(plan32.lambdas_nm)
    assert np.max(np.abs(realized - fsr) / fsr) < 0.05


def test_fsr_bound_radius_value(plan32):
    # Direct evaluation with lam=1550 nm, n_g=4.98, 16 nm total span
    # gives 1550^2 / (4.98 * 2 pi * 16e3) um = 4.799 um.
    expected = 1550.0**2 / (4.98 * 2 * np.pi * 16.0) / 1000.0
    assert plan32.fsr_bound_radius_um == pytest.approx(expected, rel=0.005)


def test_radii_under_bound(plan32):
    assert np.all(plan32.mrm_radii_um <= plan32.fsr_bound_radius_um + 1e-12)


def test_mrm_fsr_covers_band(silicon, plan32):
    # FSR of each chosen ring must clear the total WDM span.
    span = plan32.total_span_nm
    fsr = plan32.lambdas_nm**2 / (
        silicon.n_g(plan32.lambdas_nm) * 2 * np.pi * plan32.mrm_radii_um * 1000.0
    )
    assert np.all(fsr >= span - 1e-9)


def test_halving_spacing_doubles_perimeter(silicon):
    base = plan_rtr_spectrum(PlannerConfig(m=32, delta_lambda_target_nm=0.5), silicon)
    halved = plan_rtr_spectrum(PlannerConfig(m=32, delta_lambda_target_nm=0.25), silicon)
    assert halved.l_rtr_um == pytest.approx(2.0 * base.l_rtr_um, rel=0.01)


def test_doubling_all_spacings_halves_radii():
    # Wide-channel design: radii drop to roughly half the narrow design's.
    mat = wide_band_silicon_material()
    plan = plan_mrm_radii(
        plan_rtr_spectrum(PlannerConfig(m=32, delta_lambda_target_nm=1.0), mat), mat
    )
    assert plan.mrm_radii_um.min() == pytest.approx(2.25, rel=0.02)
    assert plan.mrm_radii_um.max() == pytest.approx(2.38, rel=0.02)


def test_minimal_two_channel_plan(silicon):
    plan = plan_rtr_spectrum(PlannerConfig(m=2, delta_lambda_target_nm=0.5), silicon)
    assert len(plan.lambdas_nm) == 2
    assert plan.rtr_modes[0] - plan.rtr_modes[1] == 1
    l_nm = plan.l_rtr_um * 1000.0
    residual = np.abs(
        plan.lambdas_nm - silicon.n_eff(plan.lambdas_nm) * l_nm / plan.rtr_modes
    )
    assert residual.max() < 1e-6


def test_domain_precondition(silicon):
    # Anchor wavelength beyond the material domain -> DomainExceeded.
    with pytest.raises(DomainExceeded):
        plan_rtr_spectrum(
            PlannerConfig(m=32, lambda_max_nm=1600.0, delta_lambda_target_nm=0.5),
            silicon,
        )


def test_planner_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        PlannerConfig(m=12)
    with pytest.raises(ValueError):
        PlannerConfig(m=32, delta_lambda_target_nm=-1.0)


def test_infeasible_radii():
    # A huge aggregate span leaves no integer ring mode under the bound.
    mat = default_silicon_material()
    plan = plan_rtr_spectrum(PlannerConfig(m=2, delta_lambda_target_nm=0.5), mat)
    wide = WdmPlan(
        m=2,
        lambdas_nm=plan.lambdas_nm,
        spacings_nm=np.array([1200.0, 1200.0]),
        rtr_modes=plan.rtr_modes,
        l_rtr_um=plan.l_rtr_um,
        q_mrm=plan.q_mrm,
    )
    with pytest.raises(InfeasiblePlan):
        plan_mrm_radii(wide, mat)


# -- interleaved comb -------------------------------------------------------

def test_mma_offsets_are_half_spacings(silicon, plan32):
    mma = plan_mma_spectrum(plan32, silicon)
    assert mma.l_rtr_um == pytest.approx(2 * plan32.l_rtr_um, rel=1e-12)
    offsets = mma.lambdas_nm - plan32.lambdas_nm
    assert np.allclose(offsets, plan32.spacings_nm / 2.0, atol=5e-3)
    assert offsets.mean() == pytest.approx(0.25, abs=0.01)


def test_mma_base_carriers_stay_resonant(silicon, plan32):
    mma = plan_mma_spectrum(plan32, silicon)
    l2_nm = mma.l_rtr_um * 1000.0
    for lam, mode in zip(plan32.lambdas_nm, 2 * plan32.rtr_modes):
        assert abs(lam - silicon.n_eff(lam) * l2_nm / mode) < 1e-3


def test_mma_two_channel_interleaving(silicon):
    plan = plan_rtr_spectrum(PlannerConfig(m=2, delta_lambda_target_nm=0.5), silicon)
    mma = plan_mma_spectrum(plan, silicon)
    assert plan.lambdas_nm[0] < mma.lambdas_nm[0] < plan.lambdas_nm[1]


def test_mma_interleave_conflict_on_tampered_spacings(silicon, plan32):
    # Inflated spacing metadata makes the realized offsets look like
    # collisions (below 10% of the claimed half-spacing).
    tampered = WdmPlan(
        m=plan32.m,
        lambdas_nm=plan32.lambdas_nm,
        spacings_nm=plan32.spacings_nm * 12.0,
        rtr_modes=plan32.rtr_modes,
        l_rtr_um=plan32.l_rtr_um,
        q_mrm=plan32.q_mrm,
    )
    with pytest.raises(InterleaveConflict):
        plan_mma_spectrum(tampered, silicon)


# -- validation report ------------------------------------------------------

def test_validate_plan_ok(silicon, plan32):
    report = validate_plan(plan32, silicon)
    assert report.ok
    assert report.max_resonance_residual_nm < 1e-6
    assert report.min_spacing_nm > 0
    assert report.min_fsr_margin_um >= 0


def test_validate_plan_flags_radius_violation(silicon, plan32):
    bad = WdmPlan(
        m=plan32.m,
        lambdas_nm=plan32.lambdas_nm,
        spacings_nm=plan32.spacings_nm,
        rtr_modes=plan32.rtr_modes,
        l_rtr_um=plan32.l_rtr_um,
        q_mrm=plan32.q_mrm,
        mrm_modes=plan32.mrm_modes,
        mrm_radii_um=plan32.mrm_radii_um + 1.0,  # beyond the bound
        fsr_bound_radius_um=plan32.fsr_bound_radius_um,
    )
    report = validate_plan(bad, silicon)
    assert report.min_fsr_margin_um < 0
    assert not report.ok


def test_validate_plan_reports_missing_fields(silicon):
    empty = WdmPlan(
        m=0,
        lambdas_nm=np.array([]),
        spacings_nm=np.array([]),
        rtr_modes=np.array([]),
        l_rtr_um=0.0,
        q_mrm=8000.0,
    )
    report = validate_plan(empty, silicon)
    assert not report.ok
    assert "lambdas_nm" in report.missing_fields
    assert "l_rtr_um" in report.missing_fields


def test_export_text_has_one_line_per_channel(plan32):
    text = export_plan_text(plan32)
    channel_lines = [l for l in text.splitlines() if l.startswith("channel")]
    assert len(channel_lines) == plan32.m
    assert "l_rtr_um" in text
