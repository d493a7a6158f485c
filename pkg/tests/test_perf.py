"""Scaling model against the embedded reference design points."""

import numpy as np
import pytest

from siphsim.perf import (
    REFERENCE_ROWS,
    BlockBudget,
    asic_comparison,
    fit_digital_overhead,
    heater_power,
    perf_report,
    perf_table,
    report_rows_with_diffs,
    rtr_tile_um,
    total_area,
    total_power,
)


def test_heater_values():
    assert heater_power(32) == pytest.approx(0.156, abs=1e-12)
    assert heater_power(16) == pytest.approx(0.0792, abs=1e-12)
    assert heater_power(1) == pytest.approx(0.0072, abs=1e-12)


def test_power_identity():
    p = total_power(32)
    assert p.soc_w == pytest.approx(p.laser_w + p.heater_w + p.electronics_w, rel=1e-15)


@pytest.mark.parametrize("m", sorted(REFERENCE_ROWS))
def test_reference_power_rows(m):
    ref = REFERENCE_ROWS[m]
    p = total_power(m)
    assert p.laser_w * 1e3 == pytest.approx(ref["laser_mw"], rel=0.01)
    assert p.heater_w * 1e3 == pytest.approx(ref["heater_mw"], rel=0.01)
    assert p.soc_w * 1e3 == pytest.approx(ref["soc_mw"], rel=0.01)


@pytest.mark.parametrize("m", sorted(REFERENCE_ROWS))
def test_reference_area_rows(m):
    assert total_area(m) == pytest.approx(REFERENCE_ROWS[m]["area_mm2"], rel=0.01)


@pytest.mark.parametrize("m", sorted(REFERENCE_ROWS))
def test_reference_throughput_density_energy(m):
    ref = REFERENCE_ROWS[m]
    rep = perf_report(m)
    assert rep.tmacs == pytest.approx(ref["tmacs"], rel=1e-12)  # exact
    assert rep.tops == pytest.approx(2 * ref["tmacs"], rel=1e-12)
    assert rep.density_tmacs_per_mm2 == pytest.approx(ref["density"], rel=0.015)
    assert rep.energy_fj_per_mac == pytest.approx(ref["energy_fj"], rel=0.015)


def test_report_invariants():
    rep = perf_report(32)
    assert rep.tmacs == pytest.approx(32 * 32 * 2e9 / 1e12)
    assert rep.energy_fj_per_mac == pytest.approx(
        rep.soc_w / (rep.tmacs * 1e12) * 1e15
    )
    assert rep.density_tmacs_per_mm2 == pytest.approx(rep.tmacs / rep.area_mm2)


def test_zero_clock_leaves_energy_absent():
    rep = perf_report(32, clock_hz=0.0)
    assert rep.tmacs == 0.0
    assert rep.energy_fj_per_mac is None


def test_trends_over_dimension():
    reports = perf_table((8, 16, 32, 64, 128, 256))
    energies = [r.energy_fj_per_mac for r in reports]
    densities = [r.density_tmacs_per_mm2 for r in reports]
    assert np.all(np.diff(energies) < 0)
    assert np.all(np.diff(densities) > 0)


def test_rtr_tile_matches_published_footprint():
    # 951.32 um perimeter with 5 um bends and 10 um halo -> 480 x 20 tile.
    tile = rtr_tile_um(951.32, BlockBudget())
    assert tile[0] == pytest.approx(480.0, abs=0.5)
    assert tile[1] == 20.0


def test_fitted_overhead_matches_default():
    fitted = fit_digital_overhead()
    assert fitted == pytest.approx(BlockBudget().digital_overhead_per_row_w, rel=0.01)


def test_asic_comparison_ratios():
    rep = perf_report(256)
    comp = asic_comparison(rep)
    assert comp["density_ratio"] == pytest.approx(12.6, rel=0.02)
    assert comp["energy_ratio"] == pytest.approx(40.9, rel=0.02)


def test_diff_rows_cover_reference():
    rows = report_rows_with_diffs(perf_table((16, 32)))
    assert rows[0]["m"] == 16
    assert rows[0]["soc_mw_ref"] == REFERENCE_ROWS[16]["soc_mw"]
    assert abs(rows[0]["soc_mw_diff_pct"]) < 1.0
    # M=8 row exists but carries no reference values
    rows8 = report_rows_with_diffs(perf_table((8,)))
    assert rows8[0]["soc_mw_ref"] is None


def test_area_scales_like_m_squared_asymptotically():
    a64 = total_area(64)
    a256 = total_area(256)
    assert 8 < a256 / a64 < 16  # between linear and quadratic growth
