"""Uplink bench: statistics of the model, detection behavior, sweeps."""

import numpy as np
import pytest

from siphsim.engine import FidelityMode
from siphsim.errors import RankDeficient
from siphsim.mimo import (
    MimoConfig,
    build_default_engine,
    complex_to_real_embedding,
    generate_instance,
    gram_decompose,
    linear_detect,
    neumann_z_inverse,
    qam_constellation,
    real_embedding_to_complex,
    slice_to_constellation,
    spectral_radius_diag_split,
    sweep,
)


def test_constellation_unit_energy():
    for order in (4, 16, 64):
        pts = qam_constellation(order)
        assert len(pts) == order
        assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, rel=1e-12)


def test_config_guards():
    with pytest.raises(ValueError):
        MimoConfig(n_antennas=8, n_users=8)
    with pytest.raises(ValueError):
        MimoConfig(n_antennas=64, n_users=8, qam_order=32)


def test_channel_entry_statistics():
    cfg = MimoConfig(n_antennas=64, n_users=8, trials=1, seed=0)
    rng = np.random.default_rng(123)
    samples = []
    for _ in range(200):
        inst = generate_instance(cfg, rng)
        samples.append(np.mean(np.abs(inst.h) ** 2))
    assert 0.98 <= np.mean(samples) <= 1.02


def test_received_power_expectation():
    # E||U||^2 = N M (1 + 1/snr) under the per-antenna Es/N0 convention.
    cfg = MimoConfig(n_antennas=64, n_users=8, snr_db=20.0, trials=1, seed=0)
    rng = np.random.default_rng(7)
    powers = [np.sum(np.abs(generate_instance(cfg, rng).u) ** 2) for _ in range(3000)]
    expected = 64 * 8 * (1 + 10 ** (-20 / 10))
    assert np.mean(powers) == pytest.approx(expected, rel=0.02)


def test_high_snr_limit_is_noiseless():
    cfg = MimoConfig(n_antennas=16, n_users=4, snr_db=300.0, trials=1, seed=0)
    rng = np.random.default_rng(1)
    inst = generate_instance(cfg, rng)
    assert np.allclose(inst.u, inst.h @ inst.x, atol=1e-10)


def test_gram_decomposition_identities():
    cfg = MimoConfig(n_antennas=64, n_users=8, trials=1, seed=0)
    rng = np.random.default_rng(2)
    inst = generate_instance(cfg, rng)
    z, d, e = gram_decompose(inst.h)
    assert np.allclose(z, z.conj().T, atol=1e-12)
    assert np.all(d > 0)
    assert np.allclose(np.diag(d) + e, z, atol=1e-12)
    assert np.all(np.abs(np.diag(e)) < 1e-12)


def test_rank_deficient_detection():
    h = np.ones((8, 4), dtype=complex)  # rank one
    with pytest.raises(RankDeficient):
        gram_decompose(h)


def test_spectral_radius_statistics():
    cfg = MimoConfig(n_antennas=64, n_users=8, trials=1, seed=0)
    rng = np.random.default_rng(3)
    below = 0
    for _ in range(300):
        inst = generate_instance(cfg, rng)
        z, _, _ = gram_decompose(inst.h)
        if spectral_radius_diag_split(z) < 1.0:
            below += 1
    assert below / 300 >= 0.99


def test_exact_inverse_no_noise_recovers_symbols():
    cfg = MimoConfig(n_antennas=64, n_users=8, snr_db=300.0, trials=1, seed=0)
    rng = np.random.default_rng(4)
    for _ in range(20):
        inst = generate_instance(cfg, rng)
        z, _, _ = gram_decompose(inst.h)
        det = linear_detect(inst, np.linalg.inv(z), 16)
        assert det.symbol_errors == 0
        assert det.inversion_rel_error == pytest.approx(0.0, abs=1e-12)


def test_zero_detector_errs_on_most_symbols():
    cfg = MimoConfig(n_antennas=64, n_users=8, snr_db=20.0, trials=1, seed=0)
    rng = np.random.default_rng(5)
    errors = 0
    total = 0
    for _ in range(200):
        inst = generate_instance(cfg, rng)
        det = linear_detect(inst, np.zeros((8, 8), dtype=complex), 16)
        errors += det.symbol_errors
        total += 8
    assert errors / total == pytest.approx(1 - 1 / 16, abs=0.03)


def test_neumann_detector_tracks_exact_at_convergent_k():
    cfg = MimoConfig(n_antennas=64, n_users=8, snr_db=20.0, trials=1, seed=0)
    rng = np.random.default_rng(6)
    errs_exact = 0
    errs_approx = 0
    total = 0
    for _ in range(400):
        inst = generate_instance(cfg, rng)
        z, _, _ = gram_decompose(inst.h)
        det_e = linear_detect(inst, np.linalg.inv(z), 16)
        det_a = linear_detect(inst, neumann_z_inverse(z, 8), 16)
        errs_exact += det_e.symbol_errors
        errs_approx += det_a.symbol_errors
        total += 8
    assert total >= 3200
    assert errs_approx <= 2 * errs_exact + 1


def test_inversion_error_non_increasing_in_k():
    cfg = MimoConfig(n_antennas=64, n_users=8, trials=1, seed=0)
    rng = np.random.default_rng(8)
    ks = [1, 2, 3, 4, 6, 8]
    means = np.zeros(len(ks))
    for _ in range(50):
        inst = generate_instance(cfg, rng)
        z, _, _ = gram_decompose(inst.h)
        z_inv_exact = np.linalg.inv(z)
        for i, k in enumerate(ks):
            zk = neumann_z_inverse(z, k)
            means[i] += np.linalg.norm(zk - z_inv_exact) / np.linalg.norm(z_inv_exact)
    assert np.all(np.diff(means) < 0)


def test_k1_is_pure_diagonal_inverse():
    cfg = MimoConfig(n_antennas=64, n_users=8, trials=1, seed=0)
    rng = np.random.default_rng(9)
    inst = generate_instance(cfg, rng)
    z, d, _ = gram_decompose(inst.h)
    z1 = neumann_z_inverse(z, 1)
    assert np.allclose(z1, np.diag(1.0 / d), atol=1e-12)


def test_real_embedding_round_trip():
    rng = np.random.default_rng(10)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    r = complex_to_real_embedding(z)
    assert r.shape == (8, 8)
    assert np.allclose(real_embedding_to_complex(r), z)


def test_quantized_detector_completes_end_to_end():
    cfg = MimoConfig(n_antennas=64, n_users=8, snr_db=20.0, trials=1, seed=0)
    rng = np.random.default_rng(11)
    inst = generate_instance(cfg, rng)
    z, _, _ = gram_decompose(inst.h)
    engine = build_default_engine(16, seed=21)
    zq = neumann_z_inverse(z, 3, FidelityMode.FULL, engine)
    det = linear_detect(inst, zq, 16)
    assert det.symbol_errors <= 8
    assert np.isfinite(det.inversion_rel_error)


def test_sweep_is_deterministic_and_ordered():
    cfg = MimoConfig(n_antennas=16, n_users=4, trials=5, seed=33)
    rows1 = sweep(cfg, k_values=[1, 3], snr_values=[10.0, 20.0])
    rows2 = sweep(cfg, k_values=[1, 3], snr_values=[10.0, 20.0])
    assert len(rows1) == 5 * 2 * 2
    for r1, r2 in zip(rows1, rows2):
        assert r1 == r2
    # SER non-increasing in SNR for fixed k, on average
    for k in (1, 3):
        ser_by_snr = {
            snr: np.mean([r.ser for r in rows1 if r.k == k and r.snr_db == snr])
            for snr in (10.0, 20.0)
        }
        assert ser_by_snr[20.0] <= ser_by_snr[10.0] + 1e-9


def test_slicing_picks_nearest_point():
    pts = qam_constellation(16)
    assert slice_to_constellation(np.array([pts[3] + 0.01]), pts)[0] == pts[3]
