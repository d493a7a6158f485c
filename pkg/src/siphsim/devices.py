"""
Transfer and noise models for every element of the analog signal chain.

Covers the fast vector DAC (source-series-terminated divider), the static
R-2R matrix DAC, the ring-modulator transmission notch with its monotone
level-selection calibration, the Y-junction splitter tree, the racetrack
photodetector aggregation, the transimpedance and single-to-differential
stages, the flash ADC, and the laser power budget.

Power formulas assume uniformly distributed operand codes, which is how the
average static powers that feed the system power model are defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CalibrationFailure

Q_ELEMENTARY = 1.602e-19  # C
K_BOLTZMANN = 1.38e-23  # J/K


# ---------------------------------------------------------------------------
# High-speed vector DAC (voltage-mode SST divider)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HsDacModel:
    """
    Source-series-terminated driver DAC for the vector operand.

    The binary-weighted push-pull segments form a divider whose AC
    resistance is ``r_hs`` regardless of code, while the DC supply-to-ground
    path depends on how many segments pull up versus down.
    """

    l_bits: int = 4
    v_ddh: float = 2.4
    r_hs: float = 2000.0
    c_load_f: float = 30e-15
    settling_budget_s: float = 200e-12

    def __post_init__(self):
        if self.l_bits < 1:
            raise ValueError("l_bits must be >= 1")
        if min(self.v_ddh, self.r_hs, self.c_load_f, self.settling_budget_s) <= 0:
            raise ValueError("HS-DAC parameters must be positive")

    @property
    def tau_s(self) -> float:
        return self.r_hs * self.c_load_f

    def settling_residual(self) -> float:
        """Fraction of a step left unsettled at the end of the budget."""
        return math.exp(-self.settling_budget_s / self.tau_s)

    @property
    def settling_limit(self) -> float:
        """Half-LSB residual bound for L-bit settling."""
        return 2.0 ** -(self.l_bits + 1)

    def settling_ok(self) -> bool:
        # With the nominal 2 kOhm / 30 fF / 200 ps values the residual
        # overshoots the half-LSB bound by ~14% (the rounded resistance is
        # slightly too large); reported rather than enforced.
        return self.settling_residual() < self.settling_limit


def hs_dac_static_power(d: HsDacModel, per_half_codes: bool = False) -> float:
    """
    Average static divider power of one high-speed DAC [W].

    For code ``w`` the pull-up and pull-down resistances split as
    ``(2^L - 1) r / w`` and ``(2^L - 1) r / (2^L - 1 - w)``, giving divider
    power ``V^2 w (2^L - 1 - w) / ((2^L - 1)^2 r)``. Averaging uniformly
    over all ``2^L`` codes yields the implemented form. ``per_half_codes``
    selects the variant that averages over ``2^(L-1)`` codes instead (twice
    the value); both are reported by the validation tooling since published
    write-ups disagree with their own quoted number by exactly this factor.
    """
    two_l = 2**d.l_bits
    total = sum((k - 1) * (two_l - k) for k in range(1, two_l))
    denom_codes = 2 ** (d.l_bits - 1) if per_half_codes else two_l
    return d.v_ddh**2 / d.r_hs * total / (denom_codes * (two_l - 1) ** 2)


def hs_dac_code_power(d: HsDacModel, code: int) -> float:
    """Divider power for a single code [W] (enumeration oracle helper)."""
    top = 2**d.l_bits - 1
    if not 0 <= code <= top:
        raise ValueError(f"code out of range [0, {top}]")
    return d.v_ddh**2 / d.r_hs * code * (top - code) / top**2


# ---------------------------------------------------------------------------
# R-2R matrix DAC
# ---------------------------------------------------------------------------

# Unit resistance calibrated so the uniform-code average power of the 4-bit
# ladder at 2.4 V equals the 7.2 uW budget used by the system power model.
# (The average power factor of the L=4 ladder is exactly 199/512 * V^2/R_u.)
R2R_DEFAULT_R_U = 310937.5


@dataclass(frozen=True)
class R2rDacModel:
    """Static R-2R voltage-divider DAC for one matrix operand element."""

    l_bits: int = 4
    v_ddh: float = 2.4
    r_u: float = R2R_DEFAULT_R_U

    def __post_init__(self):
        if self.l_bits < 1:
            raise ValueError("l_bits must be >= 1")
        if self.r_u <= 0 or self.v_ddh < 0:
            raise ValueError("invalid R-2R parameters")


def r2r_node_voltages(d: R2rDacModel, code: int) -> np.ndarray:
    """
    Exact node voltages of the ladder for one code (nodal analysis).

    Topology: nodes 1..L from the output side; node p carries a ``2R`` leg
    driven by bit ``L - p`` (MSB at the output node), unit resistors between
    neighbors, and a ``2R`` termination to ground at the far end. The output
    node then sits at ``V * code / 2^L``.
    """
    l_bits = d.l_bits
    top = 2**l_bits
    if not 0 <= code < top:
        raise ValueError(f"code out of range [0, {top - 1}]")
    bits = [(code >> (l_bits - 1 - p)) & 1 for p in range(l_bits)]
    g_series = 1.0 / d.r_u
    g_leg = 1.0 / (2.0 * d.r_u)
    g = np.zeros((l_bits, l_bits))
    inj = np.zeros(l_bits)
    for p in range(l_bits):
        g[p, p] += g_leg
        if bits[p]:
            inj[p] += d.v_ddh * g_leg
        if p + 1 < l_bits:
            g[p, p] += g_series
            g[p + 1, p + 1] += g_series
            g[p, p + 1] -= g_series
            g[p + 1, p] -= g_series
    g[l_bits - 1, l_bits - 1] += g_leg  # termination
    return np.linalg.solve(g, inj)


def r2r_code_power(d: R2rDacModel, code: int) -> float:
    """Supply power drawn by the ladder for one code [W]."""
    l_bits = d.l_bits
    v_nodes = r2r_node_voltages(d, code)
    bits = [(code >> (l_bits - 1 - p)) & 1 for p in range(l_bits)]
    g_leg = 1.0 / (2.0 * d.r_u)
    return sum(
        d.v_ddh * (d.v_ddh - v_nodes[p]) * g_leg
        for p in range(l_bits)
        if bits[p]
    )


def r2r_dac_static_power(d: R2rDacModel) -> float:
    """Uniform-code average static power [W] by exact nodal analysis."""
    codes = range(2**d.l_bits)
    return sum(r2r_code_power(d, c) for c in codes) / 2**d.l_bits


def r2r_dac_static_power_closed_form(d: R2rDacModel) -> float:
    """
    Average static power from the node-voltage superposition closed form.

    Node transfer: with ``G_p`` the numerator of the one-side equivalent
    resistance fraction (``R_1 = inf``, ``R_p = R_{p-1} || 2R + R``), the
    voltage at node p for a single high bit q is
    ``V * min(G_p, G_q) / 2^(p+q-1)``; codes superpose. Exact rationals are
    used so this stays an independent cross-check of the nodal solver.
    """
    l_bits = d.l_bits
    ratios: dict[int, Fraction] = {1: Fraction(1)}
    r_prev: Fraction | None = None  # None encodes the open end (infinity)
    for p in range(2, l_bits + 1):
        if r_prev is None:
            r_cur = Fraction(2) + 1
        else:
            r_cur = (r_prev * 2) / (r_prev + 2) + 1
        ratios[p] = Fraction(r_cur.numerator)
        r_prev = r_cur
    total = Fraction(0)
    for code in range(2**l_bits):
        bits = {q: (code >> (l_bits - q)) & 1 for q in range(1, l_bits + 1)}
        for p in range(1, l_bits + 1):
            if not bits[p]:
                continue
            v_frac = sum(
                Fraction(bits[q]) * min(ratios[p], ratios[q]) / 2 ** (p + q - 1)
                for q in range(1, l_bits + 1)
            )
            total += 1 - v_frac
    return float(d.v_ddh**2 / d.r_u * total / 2 ** (l_bits + 1))


# ---------------------------------------------------------------------------
# Ring modulator and E/O linearization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MrmModel:
    """
    Ring-modulator power transmission: a Lorentzian notch whose resonance
    shifts linearly with reverse bias.

    The notch floor is the transmission at exact resonance; the drive moves
    the resonance red-ward at ``shift_rate_nm_per_v``, so a carrier parked
    on the zero-bias resonance sees a monotone, sigmoid-like power gain
    versus drive voltage.
    """

    lambda_res_at_zero_nm: float
    shift_rate_nm_per_v: float = 0.04
    q_factor: float = 8000.0
    extinction_floor: float = 10 ** (-2.5 / 10)
    insertion_loss_db: float = 0.0

    def __post_init__(self):
        if not 0 < self.extinction_floor <= 1:
            raise ValueError("extinction_floor must lie in (0, 1]")
        if self.q_factor <= 0:
            raise ValueError("q_factor must be positive")

    def resonance_nm(self, v_drive: float) -> float:
        return self.lambda_res_at_zero_nm + self.shift_rate_nm_per_v * v_drive

    @property
    def fwhm_nm(self) -> float:
        return self.lambda_res_at_zero_nm / self.q_factor


def mrm_transmission(m: MrmModel, lambda_nm: float, v_drive: float):
    """
    Power gain of the modulator at ``lambda_nm`` under drive ``v_drive``.

    ``gain = 1 - (1 - floor) / (1 + (2 Q (lam - lam_res) / lam_res)^2)``,
    scaled by any off-resonance insertion loss. Monotone on each side of the
    resonance and bounded in (0, 1].
    """
    lam_res = m.resonance_nm(v_drive)
    x = 2.0 * m.q_factor * (np.asarray(lambda_nm, dtype=float) - lam_res) / lam_res
    notch = 1.0 - (1.0 - m.extinction_floor) / (1.0 + x * x)
    gain = notch * 10 ** (-m.insertion_loss_db / 10)
    return float(gain) if np.isscalar(lambda_nm) else gain


@dataclass(frozen=True)
class EoCalibrationTable:
    """
    Monotone drive-level selection linearizing the E/O power transfer.

    ``code_map[c]`` is the index into the candidate drive-level array chosen
    for operand code ``c``. DNL/INL are in LSB of the selected transfer's
    endpoint line; the raw arrays describe the uncalibrated uniform map.
    """

    code_map: np.ndarray
    drive_levels_v: np.ndarray
    gains: np.ndarray
    dnl: np.ndarray
    inl: np.ndarray
    raw_gains: np.ndarray
    raw_dnl: np.ndarray
    raw_inl: np.ndarray

    @property
    def l_bits(self) -> int:
        return int(np.log2(len(self.code_map)))

    @property
    def max_abs_inl(self) -> float:
        return float(np.max(np.abs(self.inl)))

    @property
    def max_abs_dnl(self) -> float:
        return float(np.max(np.abs(self.dnl)))

    def normalized_transfer(self) -> np.ndarray:
        """Gains rescaled to [0, 1] over the selected dynamic range."""
        g = self.gains
        return (g - g[0]) / (g[-1] - g[0])

    def export_text(self) -> str:
        lines = ["code level_index drive_v gain"]
        for c, idx in enumerate(self.code_map):
            lines.append(
                f"{c} {idx} {self.drive_levels_v[idx]:.6f} {self.gains[c]:.8f}"
            )
        return "\n".join(lines) + "\n"


def _transfer_nonlinearity(gains: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint-line DNL and INL of a monotone transfer, in LSB."""
    g = np.asarray(gains, dtype=float)
    n = len(g)
    lsb = (g[-1] - g[0]) / (n - 1)
    ideal = g[0] + lsb * np.arange(n)
    inl = (g - ideal) / lsb
    dnl = np.empty(n)
    dnl[0] = 0.0
    dnl[1:] = np.diff(g) / lsb - 1.0
    return dnl, inl


def calibrate_eo(
    m: MrmModel,
    dac_levels_v: np.ndarray,
    target_lambda_nm: float,
    inl_bound_lsb: float = 0.5,
) -> EoCalibrationTable:
    """
    Select a monotone subset of drive levels linearizing the E/O transfer.

    Given ``2^(L+1)`` candidate drive levels the selection keeps ``2^L`` of
    them (endpoints pinned to preserve the full dynamic range) minimizing
    the worst-case INL against the endpoint line, via dynamic programming
    over monotone index assignments.

    Raises
    ------
    CalibrationFailure
        If no selection achieves ``max |INL| <= inl_bound_lsb``; the best
        achieved nonlinearity is attached to the exception.
    """
    levels = np.asarray(dac_levels_v, dtype=float)
    n_cand = len(levels)
    if n_cand < 4 or (n_cand & (n_cand - 1)) != 0:
        raise ValueError("candidate level count must be a power of two >= 4")
    n_sel = n_cand // 2

    cand_gain = np.array(
        [mrm_transmission(m, target_lambda_nm, v) for v in levels]
    )
    if cand_gain[-1] <= cand_gain[0]:
        raise CalibrationFailure("transfer is not increasing over the drive range")

    lsb = (cand_gain[-1] - cand_gain[0]) / (n_sel - 1)
    ideal = cand_gain[0] + lsb * np.arange(n_sel)

    # dp[c][j]: best achievable max-deviation assigning code c to candidate
    # j with codes 0..c-1 on strictly smaller indices.
    inf = float("inf")
    dp = np.full((n_sel, n_cand), inf)
    parent = np.full((n_sel, n_cand), -1, dtype=int)
    dp[0, 0] = 0.0
    for c in range(1, n_sel):
        best_prev = inf
        best_j = -1
        for j in range(c, n_cand):
            if dp[c - 1, j - 1] < best_prev:
                best_prev = dp[c - 1, j - 1]
                best_j = j - 1
            deviation = abs(cand_gain[j] - ideal[c]) / lsb
            dp[c, j] = max(best_prev, deviation)
            parent[c, j] = best_j

    selection = [n_cand - 1]
    c, j = n_sel - 1, n_cand - 1
    while c > 0:
        j = parent[c, j]
        selection.append(j)
        c -= 1
    code_map = np.array(selection[::-1], dtype=int)

    gains = cand_gain[code_map]
    dnl, inl = _transfer_nonlinearity(gains)

    raw_levels = np.linspace(levels[0], levels[-1], n_sel)
    raw_gains = np.array(
        [mrm_transmission(m, target_lambda_nm, v) for v in raw_levels]
    )
    raw_dnl, raw_inl = _transfer_nonlinearity(raw_gains)

    table = EoCalibrationTable(
        code_map=code_map,
        drive_levels_v=levels,
        gains=gains,
        dnl=dnl,
        inl=inl,
        raw_gains=raw_gains,
        raw_dnl=raw_dnl,
        raw_inl=raw_inl,
    )
    if table.max_abs_inl > inl_bound_lsb:
        raise CalibrationFailure(
            f"best max|INL| {table.max_abs_inl:.3f} LSB exceeds the "
            f"{inl_bound_lsb} LSB bound",
            best_inl=table.max_abs_inl,
            best_dnl=table.max_abs_dnl,
        )
    return table


def uniform_drive_levels(v_ddh: float, l_bits: int) -> np.ndarray:
    """The 2^(L+1) uniform candidate levels of an (L+1)-bit linear DAC."""
    return np.linspace(0.0, v_ddh, 2 ** (l_bits + 1))


# ---------------------------------------------------------------------------
# Splitter tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitterModel:
    """1-to-M Y-junction splitter tree: log2(M) stages of 50/50 units."""

    stages: int
    split_db_per_stage: float = 3.01
    excess_loss_db_per_stage: float = 0.07

    @classmethod
    def for_fanout(cls, m: int) -> "SplitterModel":
        stages = int(np.log2(m))
        if 2**stages != m:
            raise ValueError("fanout must be a power of two")
        return cls(stages=stages)

    @property
    def fanout(self) -> int:
        return 2**self.stages

    def per_output_fraction(self) -> float:
        """Power fraction reaching each of the M outputs."""
        return (1.0 / self.fanout) * self.aggregate_fraction()

    def aggregate_fraction(self) -> float:
        """Total output power over input power (excess loss only)."""
        return 10 ** (-self.stages * self.excess_loss_db_per_stage / 10)


# ---------------------------------------------------------------------------
# Racetrack photodetector
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RtrPdModel:
    """
    Racetrack-resonator photodetector aggregating all WDM channel powers.

    The resonance-amplified absorption weights each channel by
    ``lam / n_g(lam)``; the common prefactor ``Q / (pi L)`` and the absolute
    absorption efficiency are folded into a normalization anchored to the
    chain's optical full scale (see ``absorption_normalization``).
    """

    l_rtr_um: float
    q_rtr: float = 8000.0
    responsivity_a_per_w: float = 0.5
    dr_loss_db: float = 2.5

    def __post_init__(self):
        if not 0 < self.responsivity_a_per_w <= 1:
            raise ValueError("responsivity must lie in (0, 1] A/W")
        if self.l_rtr_um <= 0 or self.q_rtr <= 0:
            raise ValueError("invalid racetrack parameters")


def rtr_raw_absorption(pd: RtrPdModel, channels, n_g_curve) -> float:
    """
    Unnormalized resonance-weighted power sum:
    ``Q / (pi L) * sum(lam_j P_j / n_g(lam_j))`` with lam and L in nm.
    """
    l_nm = pd.l_rtr_um * 1000.0
    total = 0.0
    for lam_nm, p_w in channels:
        total += lam_nm * p_w / n_g_curve(lam_nm)
    return pd.q_rtr / (math.pi * l_nm) * total


def absorption_normalization(pd: RtrPdModel, plan_lambdas_nm, n_g_curve, dr_oe_w: float) -> float:
    """
    Scale factor making a full-scale comb map to the chain full scale.

    Reference condition: every planned carrier at ``dr_oe / M`` watts (an
    aggregate of ``dr_oe`` at the detector input) must absorb exactly
    ``dr_oe``, which anchors the O/E gain absolutely. The dynamic-range
    loss itself is carried by the laser power budget.
    """
    lams = np.asarray(plan_lambdas_nm, dtype=float)
    per_channel = dr_oe_w / len(lams)
    raw = rtr_raw_absorption(pd, [(l, per_channel) for l in lams], n_g_curve)
    return dr_oe_w / raw


def rtr_absorbed_power(pd: RtrPdModel, channels, n_g_curve, normalization: float = 1.0) -> float:
    """
    Aggregated optical power seen by the detector [W].

    ``channels`` is an iterable of ``(lambda_nm, power_w)``. Linear in every
    channel power; with a plan-anchored ``normalization`` the result is
    absolute (full-scale comb -> chain full scale).
    """
    return rtr_raw_absorption(pd, channels, n_g_curve) * normalization


# ---------------------------------------------------------------------------
# TIA + single-to-differential amplifier + ADC
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalogChainModel:
    """
    Electrical receive chain: feedback TIA, S2D amplifier, noise constants.

    ``g_m_ind`` (the active-inductor device transconductance) is not pinned
    by any published value; the default is calibrated so the total chain
    noise lands at the quoted ~11 uW operating point. It is a config knob.
    """

    g_m_tia: float = 1e-3
    r_f: float = 1650.0
    c_tia_f: float = 30e-15
    g_m_amp: float = 5e-3
    r_amp: float = 600.0
    c_amp_f: float = 80e-15
    g_m_ind: float = 22e-3
    gamma: float = 2.5
    temperature_k: float = 300.0

    @property
    def r_tia(self) -> float:
        """Closed-loop TIA output resistance ``R_f / (1 + G_m R_f)``."""
        return self.r_f / (1.0 + self.g_m_tia * self.r_f)

    @property
    def dc_transimpedance(self) -> float:
        """``|TF(0)| = G_m R_f R_tia`` [Ohm]."""
        return self.g_m_tia * self.r_f * self.r_tia

    @property
    def amp_gain(self) -> float:
        return self.g_m_amp * self.r_amp

    @property
    def amp_bandwidth_hz(self) -> float:
        return 1.0 / (2.0 * math.pi * self.r_amp * self.c_amp_f)


@dataclass(frozen=True)
class TiaResponse:
    r_tia_ohm: float
    dc_transimpedance_ohm: float
    bandwidth_hz: float


def tia_response(c: AnalogChainModel) -> TiaResponse:
    """Closed-loop output resistance, DC transimpedance, and bandwidth."""
    r_tia = c.r_tia
    return TiaResponse(
        r_tia_ohm=r_tia,
        dc_transimpedance_ohm=c.dc_transimpedance,
        bandwidth_hz=1.0 / (2.0 * math.pi * r_tia * c.c_tia_f),
    )


def noise_power_at_adc(c: AnalogChainModel, i_pd_a: float) -> float:
    """
    Total noise power at the ADC input [W, 1-Ohm referred].

    Three closed-form terms, each a white source integrated over the
    single-pole amplifier bandwidth: detector shot noise through both
    gains, TIA output thermal noise through the amplifier, and the
    amplifier's own output noise.
    """
    if i_pd_a < 0:
        raise ValueError("photocurrent must be non-negative")
    kt = K_BOLTZMANN * c.temperature_k
    shot = (
        0.5
        * Q_ELEMENTARY
        * i_pd_a
        * (c.g_m_tia**2 * c.r_f**2 * c.r_tia**2)
        * c.g_m_amp**2
        * c.r_amp
        / c.c_amp_f
    )
    tia_thermal = (
        kt
        * (c.gamma * c.g_m_tia * c.r_tia**2 + c.r_tia)
        * c.g_m_amp**2
        * c.r_amp
        / c.c_amp_f
    )
    amp_thermal = (
        2.0
        * kt
        * (c.gamma * c.g_m_amp * c.r_amp + c.gamma * c.g_m_ind * c.r_amp + 1.0)
        / c.c_amp_f
    )
    return shot + tia_thermal + amp_thermal


@dataclass(frozen=True)
class AdcModel:
    """L-bit flash ADC: uniform quantizer, saturating at the rails."""

    l_bits: int = 4
    full_scale_diff_v: float = 1.0

    @property
    def comparator_count(self) -> int:
        return 2**self.l_bits - 1

    @property
    def quantization_noise_power_w(self) -> float:
        """``V_lsb^2 / 12`` [W, 1-Ohm referred]."""
        v_lsb = self.full_scale_diff_v / (2**self.l_bits - 1)
        return v_lsb**2 / 12.0


def adc_quantize(a: AdcModel, v_diff: float) -> int:
    """Quantize a differential voltage to a code; out-of-range saturates."""
    top = 2**a.l_bits - 1
    code = math.floor(v_diff / a.full_scale_diff_v * top + 0.5)
    return int(min(max(code, 0), top))


# ---------------------------------------------------------------------------
# Laser comb budget
# ---------------------------------------------------------------------------

def laser_power_per_wavelength(m: int, dr_oe_w: float) -> float:
    """
    Injection power per comb line [W] meeting the chain full scale.

    Budget at equality: two modulator dynamic-range losses plus the
    detector absorption loss (2.5 dB each) and the splitter excess loss of
    ``log2(M)`` stages. The 1/M split is recovered by summing M channels,
    so it cancels and only the excess loss scales with M.
    """
    if m < 1 or (m & (m - 1)) != 0:
        raise ValueError("m must be a power of two")
    mod_and_pd_loss = 10 ** (-7.5 / 10)
    splitter_excess = 10 ** (-math.log2(m) * 0.07 / 10)
    return dr_oe_w / (mod_and_pd_loss * splitter_excess)


def laser_total_power(m: int, dr_oe_w: float) -> float:
    """Total comb power [W]: M identical lines."""
    return m * laser_power_per_wavelength(m, dr_oe_w)


# ---------------------------------------------------------------------------
# Bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviceChain:
    """All device models of one accelerator instance plus the optical DR."""

    hs_dac: HsDacModel = field(default_factory=HsDacModel)
    r2r_dac: R2rDacModel = field(default_factory=R2rDacModel)
    mrm: MrmModel = field(default_factory=lambda: MrmModel(lambda_res_at_zero_nm=1550.0))
    rtr_pd: RtrPdModel = field(default_factory=lambda: RtrPdModel(l_rtr_um=951.32))
    analog: AnalogChainModel = field(default_factory=AnalogChainModel)
    adc: AdcModel = field(default_factory=AdcModel)
    dr_oe_w: float = 670e-6

    @property
    def l_bits(self) -> int:
        return self.hs_dac.l_bits

    def full_scale_photocurrent_a(self) -> float:
        return self.rtr_pd.responsivity_a_per_w * self.dr_oe_w

    def noise_margin_db(self) -> float:
        """Quantization-noise to chain-noise margin at full scale [dB]."""
        p_noise = noise_power_at_adc(self.analog, self.full_scale_photocurrent_a())
        return 10.0 * math.log10(self.adc.quantization_noise_power_w / p_noise)
