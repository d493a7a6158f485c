import numpy as np
import pytest

from siphsim.errors import DomainExceeded
from siphsim.material import (
    MaterialModel,
    default_silicon_material,
    material_from_band,
    wide_band_silicon_material,
)


def test_default_curves_round_to_published_endpoints():
    mat = default_silicon_material()
    assert round(mat.n_eff(1550.0), 2) == 3.73
    assert round(mat.n_eff(1534.5), 2) == 3.74
    assert round(mat.n_g(1550.0), 2) == 4.98
    assert round(mat.n_g(1534.5), 2) == 5.02


def test_wide_band_curves():
    mat = wide_band_silicon_material()
    assert round(mat.n_eff(1519.0), 2) == 3.76
    assert round(mat.n_g(1519.0), 2) == 5.06
    assert round(mat.n_g(1550.0), 2) == 4.98


def test_domain_and_ordering_invariants():
    mat = default_silicon_material()
    lo, hi = mat.domain_nm
    assert lo <= 1180.0 and hi >= 1550.0
    lam = np.linspace(lo, hi, 200)
    assert np.all(mat.n_g(lam) > mat.n_eff(lam))
    assert np.all(mat.n_eff(lam) > 1.0)


def test_out_of_domain_raises():
    mat = default_silicon_material()
    with pytest.raises(DomainExceeded):
        mat.n_eff(1100.0)
    with pytest.raises(DomainExceeded):
        mat.n_g(1600.0)


def test_band_builder_is_self_consistent():
    # The implied group index n_eff - lam dn/dlam must track the stored one.
    mat = material_from_band(1534.5, 1550.0, 5.02, 4.98, 3.73115)
    assert mat.consistency_report(1534.5, 1550.0) < 5e-3


def test_constructor_rejects_bad_curves():
    lam = np.array([1180.0, 1550.0])
    with pytest.raises(ValueError):
        MaterialModel(lam, np.array([3.7, 3.7]), np.array([3.6, 3.6]))  # n_g < n_eff
    with pytest.raises(ValueError):
        MaterialModel(np.array([1300.0, 1550.0]), np.array([3.7, 3.7]), np.array([5.0, 5.0]))
    with pytest.raises(ValueError):
        MaterialModel(lam[::-1], np.array([3.7, 3.7]), np.array([5.0, 5.0]))


def test_interpolation_matches_knots():
    mat = default_silicon_material()
    knot = mat.wavelengths_nm[10]
    assert mat.n_eff(knot) == pytest.approx(mat.n_eff_values[10])
    assert mat.n_g(knot) == pytest.approx(mat.n_g_values[10])
