"""
Massive-MIMO uplink bench: instance generation, linear detection with exact
and iteratively approximated Gram inverses, and accuracy sweeps.

SNR convention: ``snr_db`` is per-receive-antenna symbol energy over noise
power. With unit-average-energy constellations and unit-variance channel
entries the per-antenna signal power is M (the user count), so the complex
noise variance per antenna is ``M / snr_linear``. Report headers carry this
convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .devices import AdcModel, DeviceChain, HsDacModel, R2rDacModel
from .engine import EngineConfig, MvmEngine
from .errors import DimensionMismatch, RankDeficient
from .material import default_silicon_material
from .pipeline import FLOAT_FIDELITY, NeumannConfig, neumann_invert
from .wdm import PlannerConfig, plan_mrm_radii, plan_rtr_spectrum


@dataclass(frozen=True)
class MimoConfig:
    n_antennas: int
    n_users: int
    qam_order: int = 16
    snr_db: float = 20.0
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_users >= self.n_antennas:
            raise ValueError("need fewer users than antennas")
        side = int(round(math.sqrt(self.qam_order)))
        if side * side != self.qam_order or side < 2 or (side & (side - 1)) != 0:
            raise ValueError("qam_order must be a square power of four")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def qam_constellation(order: int) -> np.ndarray:
    """Square m-QAM points with unit average symbol energy."""
    side = int(round(math.sqrt(order)))
    levels = np.arange(-(side - 1), side, 2, dtype=float)
    re, im = np.meshgrid(levels, levels)
    points = (re + 1j * im).ravel()
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray  # N x M complex channel
    x: np.ndarray  # transmitted symbols (M,)
    u: np.ndarray  # received vector (N,)
    noise_var: float


def generate_instance(cfg: MimoConfig, rng: np.random.Generator) -> ChannelRealization:
    """Sample one uplink instance: u = H x + noise."""
    n, m = cfg.n_antennas, cfg.n_users
    h = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / math.sqrt(2)
    constellation = qam_constellation(cfg.qam_order)
    x = constellation[rng.integers(0, len(constellation), size=m)]
    snr_linear = 10 ** (cfg.snr_db / 10)
    noise_var = m / snr_linear  # per-antenna complex variance
    noise = (
        rng.standard_normal(n) + 1j * rng.standard_normal(n)
    ) * math.sqrt(noise_var / 2)
    u = h @ x + noise
    return ChannelRealization(h=h, x=x, u=u, noise_var=noise_var)


def gram_decompose(h: np.ndarray):
    """
    Gram matrix and its diagonal split: ``Z = H^H H = D + E``.

    Raises
    ------
    RankDeficient
        If H loses column rank (caller should resample).
    """
    h = np.asarray(h)
    z = h.conj().T @ h
    m = z.shape[0]
    if np.linalg.matrix_rank(h) < m:
        raise RankDeficient("channel matrix is rank deficient")
    d = np.real(np.diag(z))
    e = z - np.diag(d)
    return z, d, e


def spectral_radius_diag_split(z: np.ndarray) -> float:
    d = np.real(np.diag(z))
    e = z - np.diag(d)
    return float(np.max(np.abs(np.linalg.eigvals(e / d[:, None]))))


@dataclass(frozen=True)
class DetectionResult:
    x_hat: np.ndarray
    symbol_errors: int
    evm: float
    inversion_rel_error: float


def slice_to_constellation(values: np.ndarray, constellation: np.ndarray) -> np.ndarray:
    idx = np.argmin(
        np.abs(values[:, None] - constellation[None, :]), axis=1
    )
    return constellation[idx]


def linear_detect(inst: ChannelRealization, z_inv: np.ndarray, qam_order: int = 16) -> DetectionResult:
    """Estimate ``x_hat = z_inv H^H u`` and slice to the constellation."""
    h = inst.h
    if z_inv.shape != (h.shape[1], h.shape[1]):
        raise DimensionMismatch("z_inv must be M x M")
    x_soft = z_inv @ (h.conj().T @ inst.u)
    constellation = qam_constellation(qam_order)
    x_hat = slice_to_constellation(x_soft, constellation)
    errors = int(np.sum(np.abs(x_hat - inst.x) > 1e-9))
    evm = float(
        np.sqrt(np.mean(np.abs(x_soft - inst.x) ** 2))
        / np.sqrt(np.mean(np.abs(inst.x) ** 2))
    )
    z = h.conj().T @ h
    z_exact_inv = np.linalg.inv(z)
    rel = float(
        np.linalg.norm(z_inv - z_exact_inv) / np.linalg.norm(z_exact_inv)
    )
    return DetectionResult(
        x_hat=x_hat, symbol_errors=errors, evm=evm, inversion_rel_error=rel
    )


def complex_to_real_embedding(z: np.ndarray) -> np.ndarray:
    """[[Re, -Im], [Im, Re]] block embedding of a complex matrix."""
    return np.block([[z.real, -z.imag], [z.imag, z.real]])


def real_embedding_to_complex(r: np.ndarray) -> np.ndarray:
    m = r.shape[0] // 2
    return r[:m, :m] + 1j * r[m:, :m]


def neumann_z_inverse(
    z: np.ndarray,
    k: int,
    fidelity=FLOAT_FIDELITY,
    engine: MvmEngine | None = None,
) -> np.ndarray:
    """
    k-term approximate inverse of a complex Gram matrix.

    Float fidelity iterates the complex recurrence directly; quantized
    fidelities run on the 2M x 2M real block embedding (its diagonal is the
    real Gram diagonal, so the split is preserved exactly).
    """
    if fidelity == FLOAT_FIDELITY:
        d = np.real(np.diag(z))
        a = -(z - np.diag(d)) / d[:, None]
        b = np.diag(1.0 / d).astype(complex)
        y = np.zeros_like(z)
        for _ in range(k):
            y = b + a @ y
        return y
    cfg = NeumannConfig(k_max=k, fidelity=fidelity)
    run = neumann_invert(cfg, complex_to_real_embedding(z), engine=engine)
    return real_embedding_to_complex(run.final)


def build_default_engine(m: int, l_bits: int = 4, seed: int = 0) -> MvmEngine:
    """Engine with the default plan/devices for a given dimension."""
    mat = default_silicon_material()
    plan_cfg = PlannerConfig(m=m, delta_lambda_target_nm=16.0 / m)
    plan = plan_mrm_radii(plan_rtr_spectrum(plan_cfg, mat), mat)
    devices = DeviceChain(
        hs_dac=HsDacModel(l_bits=l_bits),
        r2r_dac=R2rDacModel(l_bits=l_bits),
        adc=AdcModel(l_bits=l_bits),
    )
    cfg = EngineConfig(
        m=m, l_bits=l_bits, plan=plan, material=mat, devices=devices, seed=seed
    )
    return MvmEngine(cfg).calibrate()


@dataclass(frozen=True)
class SweepRow:
    trial: int
    k: int
    fidelity: str
    snr_db: float
    ser: float
    inversion_rel_error: float
    spectral_radius: float


def sweep(
    cfg: MimoConfig,
    k_values,
    snr_values,
    fidelities=(FLOAT_FIDELITY,),
) -> list[SweepRow]:
    """
    Detection accuracy sweep over repetition count, fidelity, and SNR.

    Deterministic given ``cfg.seed``: each (snr, trial) pair derives its own
    stream, so rows are reproducible regardless of sweep ordering.
    """
    rows = []
    engines: dict[int, MvmEngine] = {}
    for fidelity in fidelities:
        fid_name = fidelity if isinstance(fidelity, str) else fidelity.value
        engine = None
        if fidelity != FLOAT_FIDELITY:
            dim = 2 * cfg.n_users
            if dim not in engines:
                engines[dim] = build_default_engine(dim, seed=cfg.seed)
            engine = engines[dim]
        for snr_db in snr_values:
            # Per-(snr, trial) streams; the snr key is offset so negative
            # dB values still form a valid seed sequence.
            snr_key = int(round(snr_db * 1000)) + 10**6
            if snr_key < 0:
                raise ValueError("snr_db below -1000 dB is not supported")
            for trial in range(cfg.trials):
                rng = np.random.default_rng([cfg.seed, snr_key, trial])
                inst_cfg = MimoConfig(
                    n_antennas=cfg.n_antennas,
                    n_users=cfg.n_users,
                    qam_order=cfg.qam_order,
                    snr_db=snr_db,
                    trials=cfg.trials,
                    seed=cfg.seed,
                )
                inst = generate_instance(inst_cfg, rng)
                z, _, _ = gram_decompose(inst.h)
                rho = spectral_radius_diag_split(z)
                for k in k_values:
                    z_inv = neumann_z_inverse(z, k, fidelity, engine)
                    det = linear_detect(inst, z_inv, cfg.qam_order)
                    rows.append(
                        SweepRow(
                            trial=trial,
                            k=k,
                            fidelity=fid_name,
                            snr_db=float(snr_db),
                            ser=det.symbol_errors / cfg.n_users,
                            inversion_rel_error=det.inversion_rel_error,
                            spectral_radius=rho,
                        )
                    )
    return rows
