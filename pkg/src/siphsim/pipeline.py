"""
Composition of the MVM engine into matrix-matrix multiply, optical matrix
add, and the diagonal-split iterative matrix inverse.

Optical power is non-negative, so signed operands travel as a differential
pair of unsigned code planes (positive and negative parts); the four partial
products recombine digitally after detection. Complex matrices are two
signed planes (real and imaginary). The iterative inverse splits
``Z = D + E`` around its diagonal and runs
``Y[k] = D^-1 + (-D^-1 E) Y[k-1]`` with ``Y[0] = 0``, which converges to
``Z^-1`` whenever the spectral radius of ``D^-1 E`` is below one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .devices import noise_power_at_adc
from .engine import (
    FidelityMode,
    MvmEngine,
    QuantizedMatrix,
    QuantizedVector,
    _round_half_up,
)
from .errors import DimensionMismatch, PlanMissing, ZeroDiagonal

FLOAT_FIDELITY = "float"


class MmmMode(Enum):
    PARALLEL = "parallel"  # M engine instances, one cycle
    TIME_MUX = "time_mux"  # one instance, M cycles


# ---------------------------------------------------------------------------
# Signed / complex encodings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignedEncoding:
    """
    Differential code representation of a signed array.

    value = scale * (pos - neg) / (2^L - 1), with at most one of pos/neg
    nonzero per element (canonical form).
    """

    pos: np.ndarray
    neg: np.ndarray
    scale: float
    l_bits: int = 4

    def __post_init__(self):
        pos = np.asarray(self.pos, dtype=int)
        neg = np.asarray(self.neg, dtype=int)
        if pos.shape != neg.shape:
            raise DimensionMismatch("pos/neg shapes differ")
        if np.any(pos * neg != 0):
            raise ValueError("encoding not canonical: overlapping pos/neg")
        top = 2**self.l_bits - 1
        if np.any(pos < 0) or np.any(pos > top) or np.any(neg < 0) or np.any(neg > top):
            raise ValueError(f"codes out of range [0, {top}]")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)

    @classmethod
    def encode(cls, values, l_bits: int = 4) -> "SignedEncoding":
        values = np.asarray(values, dtype=float)
        top = 2**l_bits - 1
        scale = float(np.max(np.abs(values)))
        if scale == 0.0:
            scale = 1.0
        q = _round_half_up(np.abs(values) / scale * top)
        q = np.clip(q, 0, top)
        pos = np.where(values > 0, q, 0)
        neg = np.where(values < 0, q, 0)
        return cls(pos=pos, neg=neg, scale=scale, l_bits=l_bits)

    def decode(self) -> np.ndarray:
        top = 2**self.l_bits - 1
        return self.scale * (self.pos - self.neg) / top

    @property
    def shape(self):
        return self.pos.shape


@dataclass(frozen=True)
class ComplexEncoding:
    real: SignedEncoding
    imag: SignedEncoding

    def __post_init__(self):
        if self.real.shape != self.imag.shape:
            raise DimensionMismatch("real/imag shapes differ")
        if self.real.l_bits != self.imag.l_bits:
            raise ValueError("real/imag widths differ")

    @classmethod
    def encode(cls, values, l_bits: int = 4) -> "ComplexEncoding":
        values = np.asarray(values, dtype=complex)
        return cls(
            real=SignedEncoding.encode(values.real, l_bits),
            imag=SignedEncoding.encode(values.imag, l_bits),
        )

    def decode(self) -> np.ndarray:
        return self.real.decode() + 1j * self.imag.decode()


# ---------------------------------------------------------------------------
# Matrix-matrix multiply
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MmmResult:
    result: QuantizedMatrix
    cycles: int


def run_mmm(
    engine: MvmEngine,
    mode: FidelityMode,
    a: QuantizedMatrix,
    y: QuantizedMatrix,
    mmm_mode: MmmMode = MmmMode.PARALLEL,
) -> MmmResult:
    """
    Column-split matrix multiply: column j of the result is the MVM of
    ``a`` with column j of ``y``. PARALLEL charges one cycle across M
    instances; TIME_MUX charges M cycles on one instance. Outputs are
    identical between modes.
    """
    m = engine.cfg.m
    if a.codes.shape != (m, m) or y.codes.shape != (m, m):
        raise DimensionMismatch("MMM operands must be M x M")
    out = np.empty((m, m), dtype=int)
    for j in range(m):
        col = QuantizedVector(codes=y.codes[:, j], scale=y.scale)
        res, _ = engine.run(mode, a, col)
        out[:, j] = res.codes
    cycles = 1 if mmm_mode is MmmMode.PARALLEL else m
    return MmmResult(
        result=QuantizedMatrix(codes=out, scale=a.scale * y.scale), cycles=cycles
    )


# ---------------------------------------------------------------------------
# Optical matrix add
# ---------------------------------------------------------------------------

def run_mma(
    engine: MvmEngine,
    mode: FidelityMode,
    ay: QuantizedMatrix,
    b: QuantizedMatrix,
    mma_plan=None,
) -> QuantizedMatrix:
    """
    Element-wise optical add of two code matrices sharing one scale.

    Both addends are budgeted half of the detector full scale so their sum
    cannot clip, hence the output code is ``round((c_ay + c_b) / 2)`` with
    output scale ``2 * shared scale``. DEVICE/FULL route both codes through
    the calibrated transfer before the add.

    ``mma_plan`` is the interleaved-comb plan carrying the second operand;
    device-fidelity runs require it.
    """
    if ay.codes.shape != b.codes.shape:
        raise DimensionMismatch("MMA operands must share a shape")
    if not math.isclose(ay.scale, b.scale, rel_tol=1e-12):
        raise ValueError("MMA operands must share a scale")
    cfg = engine.cfg
    top = 2**cfg.l_bits - 1

    if mode is FidelityMode.IDEAL:
        codes = np.clip(_round_half_up((ay.codes + b.codes) / 2.0), 0, top)
        return QuantizedMatrix(codes=codes, scale=2.0 * ay.scale)

    if mma_plan is None:
        raise PlanMissing("device-fidelity MMA needs the interleaved-comb plan")
    engine._require_calibration()
    t = engine._transfer
    # Element (i, j) is detected in row i: the first operand rides the base
    # carrier, the second the half-spacing offset line; both see the
    # doubled cavity's resonance weighting (normalized over the 2M lines).
    lam_base = cfg.plan.lambdas_nm
    lam_off = mma_plan.lambdas_nm
    n_g = cfg.material.n_g
    w_all = np.concatenate([lam_base / n_g(lam_base), lam_off / n_g(lam_off)])
    w_all = w_all / w_all.mean()
    w_base = w_all[: cfg.m][:, None]
    w_off = w_all[cfg.m :][:, None]
    eff = (t[ay.codes] * w_base + t[b.codes] * w_off) / 2.0
    gain = engine._gain_cal
    dev = cfg.devices
    i_pd = dev.rtr_pd.responsivity_a_per_w * eff * dev.dr_oe_w
    v = i_pd * dev.analog.dc_transimpedance * dev.analog.amp_gain
    if mode is FidelityMode.FULL:
        op_id = engine._op_counter
        engine._op_counter += 1
        sigma = np.sqrt(
            np.array(
                [
                    [noise_power_at_adc(dev.analog, float(i)) for i in row]
                    for row in i_pd
                ]
            )
        )
        draws = np.empty(eff.shape)
        for r in range(eff.shape[0]):
            rng = np.random.default_rng([cfg.seed, op_id, r])
            draws[r] = rng.standard_normal(eff.shape[1])
        v = v + sigma * draws
    codes = np.clip(_round_half_up(v / gain.full_scale_v * top), 0, top)
    return QuantizedMatrix(codes=codes, scale=2.0 * ay.scale)


# ---------------------------------------------------------------------------
# Signed paths
# ---------------------------------------------------------------------------

def signed_mvm(
    engine: MvmEngine, mode: FidelityMode, a: SignedEncoding, y: SignedEncoding
) -> SignedEncoding:
    """
    Signed MVM via four non-negative passes:
    ``(a+ - a-)(y+ - y-) = a+y+ + a-y- - a+y- - a-y+``.

    Output scale is ``M * a.scale * y.scale`` so the decoded vector is the
    plain dot product; the digital recombination adds the rounding of the
    four passes (at most 2 LSB of the output scale).
    """
    m = engine.cfg.m
    if a.shape != (m, m) or y.shape != (m,):
        raise DimensionMismatch("signed MVM operand shapes")
    top = 2**engine.cfg.l_bits - 1

    def _pass(mat, vec):
        qa = QuantizedMatrix(codes=mat, scale=a.scale)
        qy = QuantizedVector(codes=vec, scale=y.scale)
        res, _ = engine.run(mode, qa, qy)
        return res.codes.astype(int)

    net = (
        _pass(a.pos, y.pos)
        + _pass(a.neg, y.neg)
        - _pass(a.pos, y.neg)
        - _pass(a.neg, y.pos)
    )
    net = np.clip(net, -top, top)
    return SignedEncoding(
        pos=np.where(net > 0, net, 0),
        neg=np.where(net < 0, -net, 0),
        scale=m * a.scale * y.scale,
        l_bits=engine.cfg.l_bits,
    )


def signed_mmm(
    engine: MvmEngine,
    mode: FidelityMode,
    a: SignedEncoding,
    y: SignedEncoding,
    mmm_mode: MmmMode = MmmMode.PARALLEL,
) -> tuple[SignedEncoding, int]:
    """Column-wise signed MMM; returns the result and cycles charged."""
    m = engine.cfg.m
    if a.shape != (m, m) or y.shape != (m, m):
        raise DimensionMismatch("signed MMM operands must be M x M")
    pos = np.empty((m, m), dtype=int)
    neg = np.empty((m, m), dtype=int)
    scale = None
    for j in range(m):
        col = SignedEncoding(
            pos=y.pos[:, j], neg=y.neg[:, j], scale=y.scale, l_bits=y.l_bits
        )
        res = signed_mvm(engine, mode, a, col)
        pos[:, j] = res.pos
        neg[:, j] = res.neg
        scale = res.scale
    cycles = 4 * (1 if mmm_mode is MmmMode.PARALLEL else m)
    return (
        SignedEncoding(pos=pos, neg=neg, scale=scale, l_bits=y.l_bits),
        cycles,
    )


def complex_mmm(
    engine: MvmEngine,
    mode: FidelityMode,
    a: ComplexEncoding,
    y: ComplexEncoding,
    mmm_mode: MmmMode = MmmMode.PARALLEL,
) -> tuple[ComplexEncoding, int]:
    """
    Complex MMM as four real signed products:
    ``re = ar yr - ai yi``, ``im = ar yi + ai yr``.
    """
    rr, c1 = signed_mmm(engine, mode, a.real, y.real, mmm_mode)
    ii, c2 = signed_mmm(engine, mode, a.imag, y.imag, mmm_mode)
    ri, c3 = signed_mmm(engine, mode, a.real, y.imag, mmm_mode)
    ir, c4 = signed_mmm(engine, mode, a.imag, y.real, mmm_mode)
    l_bits = engine.cfg.l_bits
    re = SignedEncoding.encode(rr.decode() - ii.decode(), l_bits)
    im = SignedEncoding.encode(ri.decode() + ir.decode(), l_bits)
    return ComplexEncoding(real=re, imag=im), c1 + c2 + c3 + c4


# ---------------------------------------------------------------------------
# Iterative inverse
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NeumannConfig:
    """
    Iterative-inverse run parameters.

    ``fidelity`` accepts a :class:`FidelityMode` or the string ``"float"``
    for exact real arithmetic. ``requantize=True`` feeds each iterate back
    through the L-bit operand encoding (the discrete-time loop);
    ``requantize=False`` quantizes the fixed operand matrices once and then
    carries iterates in float, isolating operand-quantization error from
    iteration-requantization error.
    """

    k_max: int
    requantize: bool = True
    mmm_mode: MmmMode = MmmMode.PARALLEL
    fidelity: FidelityMode | str = FLOAT_FIDELITY

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")

    @property
    def is_float(self) -> bool:
        return self.fidelity == FLOAT_FIDELITY


@dataclass(frozen=True)
class NeumannRun:
    iterates: list  # Y[1] .. Y[k_max] as real matrices
    residuals: np.ndarray  # ||I - Y[k] Z||_F / sqrt(M)
    cycles: int
    divergence_detected: bool
    spectral_radius: float

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]


def diagonal_split(z: np.ndarray):
    """Split Z into its diagonal D and off-diagonal remainder E."""
    z = np.asarray(z, dtype=float)
    d = np.diag(z).copy()
    if np.any(d == 0):
        raise ZeroDiagonal("matrix has a zero diagonal entry")
    e = z - np.diag(d)
    return d, e


def neumann_invert(
    cfg: NeumannConfig,
    z: np.ndarray,
    engine: MvmEngine | None = None,
) -> NeumannRun:
    """
    Run the diagonal-split inverse recurrence on a real square matrix.

    Float fidelity iterates exactly; quantized fidelities encode
    ``A = -D^-1 E`` and ``B = D^-1`` as signed code planes with per-matrix
    scales and push every multiply through the engine. Residual growth over
    three consecutive iterations sets ``divergence_detected`` (reported,
    not fatal).
    """
    z = np.asarray(z, dtype=float)
    m = z.shape[0]
    if z.shape != (m, m):
        raise DimensionMismatch("z must be square")
    d, e = diagonal_split(z)
    a_mat = -e / d[:, None]  # -D^-1 E
    b_mat = np.diag(1.0 / d)  # D^-1
    rho = float(np.max(np.abs(np.linalg.eigvals(a_mat))))

    needs_engine = not cfg.is_float and cfg.requantize
    if needs_engine and engine is None:
        raise ValueError("quantized fidelity requires an engine")
    if needs_engine and engine.cfg.m != m:
        raise DimensionMismatch(f"engine is M={engine.cfg.m}, matrix is {m}")

    l_bits = engine.cfg.l_bits if engine is not None else 4
    if cfg.is_float:
        a_eff, b_eff = a_mat, b_mat
    elif not cfg.requantize:
        # Operands quantized once; iterates carried in float.
        a_eff = SignedEncoding.encode(a_mat, l_bits).decode()
        b_eff = SignedEncoding.encode(b_mat, l_bits).decode()
    else:
        a_enc = SignedEncoding.encode(a_mat, l_bits)
        b_enc = SignedEncoding.encode(b_mat, l_bits)

    eye = np.eye(m)
    y = np.zeros((m, m))
    iterates = []
    residuals = []
    cycles = 0
    grow = 0
    diverged = False
    for _ in range(cfg.k_max):
        if cfg.is_float or not cfg.requantize:
            y = b_eff + a_eff @ y
            cycles += (1 if cfg.mmm_mode is MmmMode.PARALLEL else m) + 1
        else:
            y_enc = SignedEncoding.encode(y, l_bits)
            prod, mmm_cycles = signed_mmm(
                engine, cfg.fidelity, a_enc, y_enc, cfg.mmm_mode
            )
            # Optical add of the diagonal operand: digital recombination of
            # the two signed planes at a shared scale (one detection per
            # element on the interleaved comb).
            y = prod.decode() + b_enc.decode()
            cycles += mmm_cycles + (1 if cfg.mmm_mode is MmmMode.PARALLEL else m)
        iterates.append(y.copy())
        res = float(np.linalg.norm(eye - y @ z) / math.sqrt(m))
        if residuals and res > residuals[-1]:
            grow += 1
            if grow >= 3:
                diverged = True
        else:
            grow = 0
        residuals.append(res)

    return NeumannRun(
        iterates=iterates,
        residuals=np.array(residuals),
        cycles=cycles,
        divergence_detected=diverged,
        spectral_radius=rho,
    )


def neumann_series_direct(z: np.ndarray, k: int) -> np.ndarray:
    """
    Direct truncated-series evaluation ``sum_{n<k} (-D^-1 E)^n D^-1``:
    the independent oracle for the recurrence.
    """
    d, e = diagonal_split(np.asarray(z, dtype=float))
    a_mat = -e / d[:, None]
    b_mat = np.diag(1.0 / d)
    term = b_mat.copy()
    acc = b_mat.copy()
    for _ in range(1, k):
        term = a_mat @ term
        acc = acc + term
    return acc
