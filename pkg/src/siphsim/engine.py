"""
One M x M optical matrix-vector multiply through the full signal chain.

Three fidelity levels share one code-domain contract (``golden_mvm``):

* IDEAL      exact code arithmetic;
* DEVICE     calibrated device transfer curves, no noise;
* FULL       device curves plus one chain-noise sample per row and ADC
             saturation.

The physical story behind DEVICE/FULL: each operand code drives a ring
modulator through its calibrated level map, every channel power is weighted
by the racetrack detector's resonance response, the aggregate becomes a
photocurrent, and the TIA/amplifier voltage is quantized by the flash ADC
whose reference is trimmed to the calibrated full-scale probe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .devices import (
    DeviceChain,
    MrmModel,
    absorption_normalization,
    calibrate_eo,
    noise_power_at_adc,
    rtr_absorbed_power,
    uniform_drive_levels,
)
from .errors import (
    DimensionMismatch,
    GainSpreadExceeded,
    UncalibratedDevice,
)
from .material import MaterialModel
from .wdm import WdmPlan


class FidelityMode(Enum):
    IDEAL = "ideal"
    DEVICE = "device"
    FULL = "full"


@dataclass(frozen=True)
class QuantizedVector:
    """Unsigned L-bit operand codes plus the physical value of full code."""

    codes: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=int)
        object.__setattr__(self, "codes", codes)
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def values(self, l_bits: int) -> np.ndarray:
        return self.scale * self.codes / (2**l_bits - 1)


@dataclass(frozen=True)
class QuantizedMatrix:
    codes: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=int)
        if codes.ndim != 2:
            raise DimensionMismatch("matrix codes must be 2-D")
        object.__setattr__(self, "codes", codes)
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def values(self, l_bits: int) -> np.ndarray:
        return self.scale * self.codes / (2**l_bits - 1)


def _check_codes(codes: np.ndarray, l_bits: int):
    top = 2**l_bits - 1
    if np.any(codes < 0) or np.any(codes > top):
        raise ValueError(f"codes out of range [0, {top}]")


def _round_half_up(x):
    return np.floor(np.asarray(x, dtype=float) + 0.5).astype(int)


def golden_mvm(a: QuantizedMatrix, y: QuantizedVector, l_bits: int = 4) -> QuantizedVector:
    """
    Exact-arithmetic contract every fidelity mode is measured against.

    ``out_i = clamp(round(sum_j a_ij y_j / (M (2^L - 1))))`` with output
    scale ``a.scale * y.scale``. The 1/M normalization mirrors the physical
    splitter: a full-scale row times a full-scale vector maps back to full
    scale.
    """
    if a.codes.shape[1] != y.codes.shape[0] or a.codes.shape[0] != a.codes.shape[1]:
        raise DimensionMismatch(
            f"operand shapes {a.codes.shape} x {y.codes.shape} do not form an MVM"
        )
    _check_codes(a.codes, l_bits)
    _check_codes(y.codes, l_bits)
    m = a.codes.shape[0]
    top = 2**l_bits - 1
    raw = a.codes.astype(np.int64) @ y.codes.astype(np.int64)
    codes = np.clip(_round_half_up(raw / (m * top)), 0, top)
    return QuantizedVector(codes=codes, scale=a.scale * y.scale)


@dataclass(frozen=True)
class EngineConfig:
    m: int
    l_bits: int
    plan: WdmPlan
    material: MaterialModel
    devices: DeviceChain = field(default_factory=DeviceChain)
    clock_hz: float = 2e9
    seed: int = 0
    adjacent_leakage: float = 0.0  # optional crosstalk knob, off by default

    def __post_init__(self):
        if self.plan.m != self.m:
            raise ValueError(f"plan is for M={self.plan.m}, config says M={self.m}")
        if self.devices.hs_dac.l_bits != self.l_bits or self.devices.adc.l_bits != self.l_bits:
            raise ValueError("DAC/ADC widths must match l_bits")
        if self.clock_hz <= 0:
            raise ValueError("clock_hz must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        # Clock-period feasibility is checked, not simulated: the DAC
        # settling budget must fit inside half the symbol period.
        period = 1.0 / self.clock_hz
        if self.devices.hs_dac.settling_budget_s > 0.5 * period:
            raise ValueError(
                f"settling budget {self.devices.hs_dac.settling_budget_s} s "
                f"does not fit the {period} s clock period"
            )


@dataclass(frozen=True)
class RowDiagnostic:
    row: int
    photocurrent_a: float
    pre_adc_v: float
    noise_v: float
    out_code: int
    golden_code: int
    error_lsb: int


@dataclass(frozen=True)
class GainCal:
    """Full-scale probe result aligning the analog chain to the contract."""

    full_scale_v: float
    lsb_per_volt: float
    row_spread: float


class MvmEngine:
    """
    One accelerator instance. Construct, ``calibrate()``, then ``run()``.

    Rows share immutable configuration; FULL-mode noise uses one counter-
    keyed stream per (operation, row) so results are bit-identical no
    matter how rows are scheduled.
    """

    def __init__(self, cfg: EngineConfig, row_responsivity_scale=None):
        self.cfg = cfg
        self._calibrated = False
        self._transfer = None  # normalized E/O transfer per code
        self._cal_table = None
        self._weights = None  # per-channel detector weights, mean 1
        self._gain_cal = None
        self._op_counter = 0
        if row_responsivity_scale is None:
            self._row_scale = np.ones(cfg.m)
        else:
            self._row_scale = np.asarray(row_responsivity_scale, dtype=float)
            if self._row_scale.shape != (cfg.m,):
                raise DimensionMismatch("row_responsivity_scale must have M entries")

    # -- calibration -------------------------------------------------------

    def calibrate(self) -> "MvmEngine":
        cfg = self.cfg
        dev = cfg.devices
        # All channels share device geometry up to their resonance
        # wavelength; the drive-axis transfer shape is identical, so one
        # table serves every modulator.
        mrm = MrmModel(
            lambda_res_at_zero_nm=float(cfg.plan.lambdas_nm[0]),
            shift_rate_nm_per_v=dev.mrm.shift_rate_nm_per_v,
            q_factor=dev.mrm.q_factor,
            extinction_floor=dev.mrm.extinction_floor,
            insertion_loss_db=dev.mrm.insertion_loss_db,
        )
        levels = uniform_drive_levels(dev.hs_dac.v_ddh, cfg.l_bits)
        self._cal_table = calibrate_eo(mrm, levels, mrm.lambda_res_at_zero_nm)
        self._transfer = self._cal_table.normalized_transfer()

        # Per-channel detection weights come from the resonance-weighted
        # absorption model, anchored so a uniform full-scale comb hits the
        # chain full scale exactly.
        lam = cfg.plan.lambdas_nm
        per_channel = dev.dr_oe_w / cfg.m
        norm = absorption_normalization(dev.rtr_pd, lam, cfg.material.n_g, dev.dr_oe_w)
        self._weights = np.array(
            [
                rtr_absorbed_power(dev.rtr_pd, [(l, per_channel)], cfg.material.n_g, norm)
                for l in lam
            ]
        ) * (cfg.m / dev.dr_oe_w)

        self._calibrated = True
        self._gain_cal = self.end_to_end_gain_cal()
        return self

    @property
    def calibration_table(self):
        return self._cal_table

    def _require_calibration(self):
        if not self._calibrated:
            raise UncalibratedDevice("run calibrate() before device-fidelity use")

    # -- core analog chain -------------------------------------------------

    def _row_effective_fraction(self, a_codes: np.ndarray, y_codes: np.ndarray) -> np.ndarray:
        """Per-row detector-input power as a fraction of full scale."""
        t = self._transfer
        ty = t[y_codes] * self._weights
        ta = t[a_codes]
        if self.cfg.adjacent_leakage > 0.0:
            eps = self.cfg.adjacent_leakage
            leak = np.zeros_like(ty)
            leak[1:] += eps * ty[:-1]
            leak[:-1] += eps * ty[1:]
            ty = ty + leak
        return ta @ ty / self.cfg.m

    def _chain_voltage(self, eff_fraction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dev = self.cfg.devices
        p_pd = eff_fraction * dev.dr_oe_w
        i_pd = dev.rtr_pd.responsivity_a_per_w * p_pd * self._row_scale
        v = i_pd * dev.analog.dc_transimpedance * dev.analog.amp_gain
        return i_pd, v

    def end_to_end_gain_cal(self, spread_tolerance: float = 0.01) -> GainCal:
        """
        Probe the chain with full-scale operands; returns the scalar that
        aligns DEVICE output codes with the golden contract.

        Raises
        ------
        GainSpreadExceeded
            If per-row full-scale voltages disagree by the tolerance or
            more (a row-gain fault breaks the shared-scalar assumption).
        """
        self._require_calibration()
        m, top = self.cfg.m, 2**self.cfg.l_bits - 1
        a = np.full((m, m), top, dtype=int)
        y = np.full(m, top, dtype=int)
        eff = self._row_effective_fraction(a, y)
        _, v = self._chain_voltage(eff)
        spread = float((v.max() - v.min()) / v.mean())
        if spread >= spread_tolerance:
            raise GainSpreadExceeded(
                f"row gain spread {spread:.4f} >= {spread_tolerance}"
            )
        full_scale_v = float(v.mean())
        return GainCal(
            full_scale_v=full_scale_v,
            lsb_per_volt=top / full_scale_v,
            row_spread=spread,
        )

    # -- noise -------------------------------------------------------------

    def _noise_sigma_v(self, i_pd: np.ndarray) -> np.ndarray:
        analog = self.cfg.devices.analog
        return np.sqrt([noise_power_at_adc(analog, float(i)) for i in i_pd])

    def _row_noise(self, op_id: int, rows: int) -> np.ndarray:
        # One stream per (seed, op, row): deterministic under any row order.
        out = np.empty(rows)
        for r in range(rows):
            rng = np.random.default_rng([self.cfg.seed, op_id, r])
            out[r] = rng.standard_normal()
        return out

    # -- public ops ----------------------------------------------------------

    def run(
        self, mode: FidelityMode, a: QuantizedMatrix, y: QuantizedVector
    ) -> tuple[QuantizedVector, list[RowDiagnostic]]:
        """
        One MVM at the requested fidelity; returns codes and per-row
        diagnostics (photocurrent, pre-ADC voltage, noise draw, code error
        versus golden).
        """
        cfg = self.cfg
        if a.codes.shape != (cfg.m, cfg.m) or y.codes.shape != (cfg.m,):
            raise DimensionMismatch(
                f"expected {cfg.m}x{cfg.m} by {cfg.m}, got "
                f"{a.codes.shape} x {y.codes.shape}"
            )
        _check_codes(a.codes, cfg.l_bits)
        _check_codes(y.codes, cfg.l_bits)
        golden = golden_mvm(a, y, cfg.l_bits)
        op_id = self._op_counter
        self._op_counter += 1

        if mode is FidelityMode.IDEAL:
            diags = [
                RowDiagnostic(r, 0.0, 0.0, 0.0, int(c), int(c), 0)
                for r, c in enumerate(golden.codes)
            ]
            return golden, diags

        self._require_calibration()
        top = 2**cfg.l_bits - 1
        eff = self._row_effective_fraction(a.codes, y.codes)
        i_pd, v = self._chain_voltage(eff)

        noise = np.zeros(cfg.m)
        if mode is FidelityMode.FULL:
            noise = self._noise_sigma_v(i_pd) * self._row_noise(op_id, cfg.m)
        v_total = v + noise

        # ADC reference trimmed to the calibrated full-scale probe.
        codes = np.clip(
            _round_half_up(v_total / self._gain_cal.full_scale_v * top), 0, top
        )
        diags = [
            RowDiagnostic(
                row=r,
                photocurrent_a=float(i_pd[r]),
                pre_adc_v=float(v_total[r]),
                noise_v=float(noise[r]),
                out_code=int(codes[r]),
                golden_code=int(golden.codes[r]),
                error_lsb=int(codes[r] - golden.codes[r]),
            )
            for r in range(cfg.m)
        ]
        return QuantizedVector(codes=codes, scale=a.scale * y.scale), diags

    def run_mvm(self, mode, a, y):
        return self.run(mode, a, y)


def exhaustive_code_space(m: int, l_bits: int):
    """Yield every (matrix, vector) code combination; use for tiny spaces."""
    top = 2**l_bits
    n_mat = top ** (m * m)
    n_vec = top**m
    for a_idx in range(n_mat):
        a = np.empty((m, m), dtype=int)
        v = a_idx
        for k in range(m * m):
            a[k // m, k % m] = v % top
            v //= top
        for y_idx in range(n_vec):
            y = np.empty(m, dtype=int)
            v = y_idx
            for k in range(m):
                y[k] = v % top
                v //= top
            yield a.copy(), y
