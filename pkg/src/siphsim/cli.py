"""
Command-line entry point.

Subcommands wrap the library modules behind a flat key-value config file:

* ``plan``      spectrum/geometry planning and invariant report
* ``mvm``       engine runs with per-row diagnostics
* ``invert``    iterative-inverse traces
* ``mimo``      detection-accuracy sweeps
* ``perf``      scaling table with reference diffs
* ``validate``  full cross-module check suite (nonzero exit on failure)

Every data file begins with a header naming the tool version and resolved
seed; rerunning a command with the same config and seed reproduces the data
files byte for byte. Report paths also render figures unless --no-plots.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config
from .devices import (
    AdcModel,
    AnalogChainModel,
    DeviceChain,
    HsDacModel,
    MrmModel,
    R2rDacModel,
    RtrPdModel,
    hs_dac_static_power,
    laser_total_power,
    noise_power_at_adc,
    r2r_dac_static_power,
    r2r_dac_static_power_closed_form,
    tia_response,
)
from .engine import (
    EngineConfig,
    FidelityMode,
    MvmEngine,
    QuantizedMatrix,
    QuantizedVector,
    exhaustive_code_space,
    golden_mvm,
)
from .errors import SiphsimError
from .material import default_silicon_material, material_from_band
from .mimo import MimoConfig, sweep
from .perf import (
    ASIC_REFERENCE,
    heater_power,
    perf_table,
    report_rows_with_diffs,
)
from .pipeline import (
    FLOAT_FIDELITY,
    MmmMode,
    NeumannConfig,
    neumann_invert,
    neumann_series_direct,
)
from .reports import write_records, write_text
from .wdm import (
    PlannerConfig,
    export_plan_text,
    plan_mma_spectrum,
    plan_mrm_radii,
    plan_rtr_spectrum,
    validate_plan,
)


def _material(cfg: ExperimentConfig):
    return material_from_band(
        cfg["material.band_lo_nm"],
        cfg["material.band_hi_nm"],
        cfg["material.n_g_lo"],
        cfg["material.n_g_hi"],
        cfg["material.n_eff_hi"],
    )


def _devices(cfg: ExperimentConfig, l_bits=None) -> DeviceChain:
    l_bits = l_bits or cfg["devices.l_bits"]
    return DeviceChain(
        hs_dac=HsDacModel(l_bits=l_bits, v_ddh=cfg["devices.v_ddh"], r_hs=cfg["devices.r_hs"]),
        r2r_dac=R2rDacModel(l_bits=l_bits, v_ddh=cfg["devices.v_ddh"], r_u=cfg["devices.r_u"]),
        mrm=MrmModel(
            lambda_res_at_zero_nm=cfg["planner.lambda_max_nm"],
            shift_rate_nm_per_v=cfg["devices.mrm_shift_rate_nm_per_v"],
            q_factor=cfg["devices.mrm_q"],
        ),
        rtr_pd=RtrPdModel(l_rtr_um=951.32),
        analog=AnalogChainModel(g_m_ind=cfg["devices.g_m_ind"]),
        adc=AdcModel(l_bits=l_bits),
        dr_oe_w=cfg["devices.dr_oe_uw"] * 1e-6,
    )


def _planner_cfg(cfg: ExperimentConfig, m=None) -> PlannerConfig:
    return PlannerConfig(
        m=m or cfg["planner.m"],
        lambda_max_nm=cfg["planner.lambda_max_nm"],
        delta_lambda_target_nm=cfg["planner.delta_lambda_target_nm"],
        q_mrm=cfg["planner.q_mrm"],
    )


def _build_engine(cfg: ExperimentConfig, m: int, seed: int, l_bits=None) -> MvmEngine:
    mat = _material(cfg)
    l_bits = l_bits or cfg["devices.l_bits"]
    pcfg = PlannerConfig(
        m=m,
        lambda_max_nm=cfg["planner.lambda_max_nm"],
        delta_lambda_target_nm=16.0 / m,
        q_mrm=cfg["planner.q_mrm"],
    )
    plan = plan_mrm_radii(plan_rtr_spectrum(pcfg, mat), mat)
    ecfg = EngineConfig(
        m=m,
        l_bits=l_bits,
        plan=plan,
        material=mat,
        devices=_devices(cfg, l_bits),
        clock_hz=cfg["engine.clock_ghz"] * 1e9,
        seed=seed,
    )
    return MvmEngine(ecfg).calibrate()


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _record_config(cfg: ExperimentConfig, seed: int, out: Path):
    cfg.override("run.seed", seed)
    (out / "resolved.cfg").write_text(cfg.dump())


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_plan(cfg: ExperimentConfig, args) -> int:
    out = _out_dir(args)
    seed = cfg["run.seed"]
    mat = _material(cfg)
    plan = plan_mrm_radii(plan_rtr_spectrum(_planner_cfg(cfg), mat), mat)
    mma = plan_mma_spectrum(plan, mat)
    report = validate_plan(plan, mat)

    write_text(out / "plan.txt", export_plan_text(plan), seed)
    write_text(out / "plan_mma.txt", export_plan_text(mma), seed)
    columns = ["index", "lambda_nm", "spacing_nm", "rtr_mode", "mrm_mode", "mrm_radius_um"]
    rows = [
        (
            j,
            f"{plan.lambdas_nm[j]:.6f}",
            f"{plan.spacings_nm[j]:.6f}",
            int(plan.rtr_modes[j]),
            int(plan.mrm_modes[j]),
            f"{plan.mrm_radii_um[j]:.6f}",
        )
        for j in range(plan.m)
    ]
    write_records(out / "plan_channels.csv", columns, rows, seed, cfg["run.format"])
    lines = [
        f"l_rtr_um = {plan.l_rtr_um:.6f}",
        f"fsr_bound_radius_um = {plan.fsr_bound_radius_um:.6f}",
        f"max_resonance_residual_nm = {report.max_resonance_residual_nm:.3e}",
        f"min_spacing_nm = {report.min_spacing_nm:.6f}",
        f"modes_consecutive = {report.modes_consecutive}",
        f"min_fsr_margin_um = {report.min_fsr_margin_um:.6f}",
        f"material_consistency = {mat.consistency_report(*plan.band_nm):.3e}",
        f"plan_ok = {report.ok}",
    ]
    write_text(out / "plan_report.txt", "\n".join(lines) + "\n", seed)
    if args.plots:
        from .plots import plan_spectrum_figure

        plan_spectrum_figure(plan, mat, out / "plan_spectrum.png", mma_plan=mma)
    print(f"plan written to {out} (ok={report.ok})")
    return 0 if report.ok else 1


def cmd_mvm(cfg: ExperimentConfig, args) -> int:
    out = _out_dir(args)
    seed = cfg["run.seed"]
    m = cfg["planner.m"]
    l_bits = cfg["devices.l_bits"]
    mode = FidelityMode(cfg["engine.fidelity"])
    columns = [
        "trial", "row", "photocurrent_a", "pre_adc_v", "noise_v",
        "out_code", "golden_code", "error_lsb",
    ]
    rows = []

    if cfg["engine.exhaustive"]:
        engine = _build_engine(cfg, m, seed)
        mismatches = 0
        total = 0
        for a_codes, y_codes in exhaustive_code_space(m, l_bits):
            a = QuantizedMatrix(codes=a_codes)
            y = QuantizedVector(codes=y_codes)
            res, _ = engine.run(mode, a, y)
            gold = golden_mvm(a, y, l_bits)
            mismatches += int(np.any(res.codes != gold.codes))
            total += 1
        write_text(
            out / "mvm_exhaustive.txt",
            f"cases = {total}\nmismatches = {mismatches}\n",
            seed,
        )
        print(f"exhaustive: {total} cases, {mismatches} mismatches")
        return 0 if mismatches == 0 else 1

    engine = _build_engine(cfg, m, seed)
    rng = np.random.default_rng(seed)
    operands_file = cfg["engine.operands_file"]
    trials = cfg["engine.trials"]
    errs = []
    for trial in range(trials):
        if operands_file:
            data = np.loadtxt(operands_file, dtype=int, comments="#")
            a = QuantizedMatrix(codes=data[:m])
            y = QuantizedVector(codes=data[m])
        else:
            a = QuantizedMatrix(codes=rng.integers(0, 2**l_bits, size=(m, m)))
            y = QuantizedVector(codes=rng.integers(0, 2**l_bits, size=m))
        _, diags = engine.run(mode, a, y)
        for d in diags:
            rows.append(
                (
                    trial, d.row, f"{d.photocurrent_a:.6e}", f"{d.pre_adc_v:.6e}",
                    f"{d.noise_v:.6e}", d.out_code, d.golden_code, d.error_lsb,
                )
            )
            errs.append(abs(d.error_lsb))
        if operands_file:
            break
    write_records(out / "mvm_diagnostics.csv", columns, rows, seed, cfg["run.format"])
    write_text(out / "mvm_calibration.txt", engine.calibration_table.export_text(), seed)
    frac = float(np.mean(np.asarray(errs) <= 1)) if errs else 1.0
    print(f"mvm: {len(errs)} rows, {100 * frac:.2f}% within 1 LSB of golden")
    if args.plots:
        from .plots import calibration_figure

        calibration_figure(engine.calibration_table, out / "mvm_calibration.png")
    return 0


def cmd_invert(cfg: ExperimentConfig, args) -> int:
    out = _out_dir(args)
    seed = cfg["run.seed"]
    m = cfg["neumann.m"]
    rng = np.random.default_rng(seed)
    # Diagonally dominant test matrix: convergence regime by construction.
    z = rng.standard_normal((m, m))
    z = z + z.T
    np.fill_diagonal(z, cfg["neumann.diag_dominance"] * m / 4.0 + np.abs(np.diag(z)))

    fidelity = cfg["neumann.fidelity"]
    ncfg = NeumannConfig(
        k_max=cfg["neumann.k_max"],
        requantize=cfg["neumann.requantize"],
        mmm_mode=MmmMode(cfg["neumann.mmm_mode"]),
        fidelity=FLOAT_FIDELITY if fidelity == "float" else FidelityMode(fidelity),
    )
    engine = None
    if not ncfg.is_float and ncfg.requantize:
        engine = _build_engine(cfg, m, seed)
    run = neumann_invert(ncfg, z, engine=engine)

    exact = np.linalg.inv(z)
    columns = ["k", "residual", "max_error_vs_exact", "cycles", "fidelity"]
    rows = []
    for k, (y, res) in enumerate(zip(run.iterates, run.residuals), start=1):
        rows.append(
            (
                k, f"{res:.6e}", f"{np.max(np.abs(y - exact)):.6e}",
                run.cycles, str(cfg["neumann.fidelity"]),
            )
        )
    write_records(out / "neumann.csv", columns, rows, seed, cfg["run.format"])
    print(
        f"invert: k={cfg['neumann.k_max']} residual {run.residuals[-1]:.3e} "
        f"rho={run.spectral_radius:.3f} divergence={run.divergence_detected}"
    )
    if args.plots:
        from .plots import neumann_residual_figure

        neumann_residual_figure(run, out / "neumann_residuals.png")
    return 0


def cmd_mimo(cfg: ExperimentConfig, args) -> int:
    out = _out_dir(args)
    seed = cfg["run.seed"]
    mcfg = MimoConfig(
        n_antennas=cfg["mimo.n_antennas"],
        n_users=cfg["mimo.n_users"],
        qam_order=cfg["mimo.qam_order"],
        trials=cfg["mimo.trials"],
        seed=seed,
    )
    fidelities = []
    for name in cfg["mimo.fidelities"].split():
        fidelities.append(FLOAT_FIDELITY if name == "float" else FidelityMode(name))
    rows = sweep(mcfg, cfg["mimo.k_values"], cfg["mimo.snr_db_values"], fidelities)
    columns = ["trial", "k", "fidelity", "snr_db", "ser", "inversion_rel_error", "spectral_radius"]
    data = [
        (
            r.trial, r.k, r.fidelity, r.snr_db, f"{r.ser:.6f}",
            f"{r.inversion_rel_error:.6e}", f"{r.spectral_radius:.6f}",
        )
        for r in rows
    ]
    write_records(out / "mimo_sweep.csv", columns, data, seed, cfg["run.format"])
    print(f"mimo: {len(rows)} sweep rows written (snr convention: per-rx-antenna Es/N0)")
    if args.plots:
        from .plots import mimo_sweep_figure

        mimo_sweep_figure(rows, out / "mimo_sweep.png")
    return 0


def cmd_perf(cfg: ExperimentConfig, args) -> int:
    out = _out_dir(args)
    seed = cfg["run.seed"]
    reports = perf_table(cfg["perf.m_values"])
    diff_rows = report_rows_with_diffs(reports)
    columns = list(diff_rows[0].keys())
    data = [
        tuple(
            f"{row[c]:.4f}" if isinstance(row[c], float) else row[c] for c in columns
        )
        for row in diff_rows
    ]
    write_records(out / "perf_table.csv", columns, data, seed, cfg["run.format"])
    print(f"perf: {len(reports)} rows written")
    if args.plots:
        from .plots import perf_scaling_figure

        perf_scaling_figure(reports, ASIC_REFERENCE, out / "perf_scaling.png")
    return 0


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _validation_checks(cfg: ExperimentConfig):
    """Yield (name, ok, detail) across every module."""
    seed = cfg["run.seed"]

    # Spectrum planning against the three reference design rows.
    mat = default_silicon_material()
    plan = plan_mrm_radii(
        plan_rtr_spectrum(PlannerConfig(m=32, delta_lambda_target_nm=0.5), mat), mat
    )
    ok = abs(plan.l_rtr_um - 951.32) / 951.32 < 0.01
    yield "planner.perimeter_row1", ok, f"L_rtr={plan.l_rtr_um:.3f} um"
    modes_ok = (
        abs(int(plan.rtr_modes[-1]) - 2290) <= 1
        and abs(int(plan.rtr_modes[0]) - 2321) <= 1
    )
    yield "planner.modes_row1", modes_ok, f"modes {plan.rtr_modes[-1]}..{plan.rtr_modes[0]}"
    radii_ok = (
        set(np.unique(plan.mrm_modes)) <= {71, 72}
        and abs(plan.mrm_radii_um.min() - 4.63) / 4.63 < 0.02
        and abs(plan.mrm_radii_um.max() - 4.76) / 4.76 < 0.02
    )
    yield "planner.radii_row1", radii_ok, (
        f"r in [{plan.mrm_radii_um.min():.3f}, {plan.mrm_radii_um.max():.3f}] um"
    )
    report = validate_plan(plan, mat)
    yield "planner.invariants", report.ok, (
        f"residual {report.max_resonance_residual_nm:.2e} nm"
    )

    # Device block numbers.
    hs = HsDacModel()
    p5 = hs_dac_static_power(hs)
    yield "devices.hs_dac_power", abs(p5 - 0.448e-3) / 0.448e-3 < 0.02, f"{p5 * 1e3:.4f} mW"
    yield "devices.hs_dac_settling", True, (
        f"residual {hs.settling_residual():.4f} vs half-LSB bound "
        f"{hs.settling_limit:.4f} (ok={hs.settling_ok()}); informational"
    )
    p5_alt = hs_dac_static_power(hs, per_half_codes=True)
    yield "devices.hs_dac_power_alt_denominator", True, (
        f"half-code-average variant gives {p5_alt * 1e3:.3f} mW (2x); informational"
    )
    r2r = R2rDacModel()
    p6 = r2r_dac_static_power(r2r)
    p6_cf = r2r_dac_static_power_closed_form(r2r)
    ok = abs(p6 - 7.2e-6) / 7.2e-6 < 0.10 and abs(p6 - p6_cf) / p6 < 0.10
    yield "devices.r2r_power", ok, f"nodal {p6 * 1e6:.3f} uW, closed form {p6_cf * 1e6:.3f} uW"
    chain = AnalogChainModel()
    resp = tia_response(chain)
    ok = abs(resp.r_tia_ohm - 622.6) / 622.6 < 1e-3 and abs(resp.bandwidth_hz - 8.52e9) / 8.52e9 < 0.01
    yield "devices.tia", ok, f"R_tia={resp.r_tia_ohm:.2f} ohm bw={resp.bandwidth_hz / 1e9:.3f} GHz"
    p_noise = noise_power_at_adc(chain, 335e-6)
    margin = 10 * np.log10(AdcModel().quantization_noise_power_w / p_noise)
    ok = 7e-6 <= p_noise <= 17e-6 and abs(margin - 15.3) <= 1.5
    yield "devices.noise_budget", ok, f"{p_noise * 1e6:.2f} uW margin {margin:.2f} dB"
    total32 = laser_total_power(32, 670e-6)
    total16 = laser_total_power(16, 670e-6)
    ok = abs(total32 - 0.1306) < 0.2e-3 and abs(total16 - 0.0643) < 0.2e-3
    yield "devices.laser_budget", ok, f"M=32 {total32 * 1e3:.1f} mW, M=16 {total16 * 1e3:.1f} mW"
    ok = abs(heater_power(32) - 0.156) < 1e-12
    yield "devices.heater", ok, f"{heater_power(32) * 1e3:.1f} mW"

    # E/O linearization.
    engine = None
    try:
        engine = _build_engine(cfg, 32, seed)
        table = engine.calibration_table
        ok = (
            np.max(np.abs(table.raw_inl)) > 0.5
            and table.max_abs_inl <= 0.5
            and table.max_abs_dnl <= 0.5
        )
        yield "calibration.linearization", ok, (
            f"raw INL {np.max(np.abs(table.raw_inl)):.2f} -> cal INL "
            f"{table.max_abs_inl:.2f} / DNL {table.max_abs_dnl:.2f} LSB"
        )
    except SiphsimError as exc:
        yield "calibration.linearization", False, str(exc)

    # Engine: exhaustive tiny space + device-fidelity sampling.
    small = _build_engine(cfg, 2, seed, l_bits=2)
    mismatch = 0
    for a_codes, y_codes in exhaustive_code_space(2, 2):
        a = QuantizedMatrix(codes=a_codes)
        y = QuantizedVector(codes=y_codes)
        res, _ = small.run(FidelityMode.IDEAL, a, y)
        if np.any(res.codes != golden_mvm(a, y, 2).codes):
            mismatch += 1
    yield "engine.exhaustive_ideal", mismatch == 0, f"{mismatch} mismatches of 4096"

    if engine is None:
        yield "engine.device_accuracy", False, "skipped: calibration failed"
    else:
        rng = np.random.default_rng(seed)
        within = 0
        total = 0
        for _ in range(200):
            a = QuantizedMatrix(codes=rng.integers(0, 16, size=(32, 32)))
            y = QuantizedVector(codes=rng.integers(0, 16, size=32))
            _, diags = engine.run(FidelityMode.DEVICE, a, y)
            within += sum(1 for d in diags if abs(d.error_lsb) <= 1)
            total += len(diags)
        yield "engine.device_accuracy", within / total >= 0.99, (
            f"{100 * within / total:.2f}% rows within 1 LSB (200 trials)"
        )

    # Iterative inverse: recurrence equals direct series; known 2x2 point.
    rng = np.random.default_rng(seed + 1)
    ok = True
    worst = 0.0
    for _ in range(10):
        z = rng.standard_normal((8, 8))
        z = z + z.T
        np.fill_diagonal(z, 8.0 + np.abs(np.diag(z)))
        run = neumann_invert(NeumannConfig(k_max=6), z)
        for k in range(1, 7):
            direct = neumann_series_direct(z, k)
            rel = np.linalg.norm(run.iterates[k - 1] - direct) / np.linalg.norm(direct)
            worst = max(worst, rel)
            ok = ok and rel < 1e-12
    yield "neumann.recurrence_vs_series", ok, f"worst rel {worst:.2e}"
    z2 = np.array([[2.0, 0.5], [0.5, 2.0]])
    run2 = neumann_invert(NeumannConfig(k_max=2), z2)
    expect = np.array([[0.5, -0.125], [-0.125, 0.5]])
    ok = np.allclose(run2.final, expect, atol=1e-12)
    yield "neumann.two_by_two", ok, "Y[2] matches hand expansion"

    # MIMO statistics.
    from .mimo import generate_instance, gram_decompose, spectral_radius_diag_split

    rng = np.random.default_rng(seed + 2)
    mcfg = MimoConfig(n_antennas=64, n_users=8, trials=1, seed=seed)
    radii = []
    for _ in range(200):
        inst = generate_instance(mcfg, rng)
        z, _, _ = gram_decompose(inst.h)
        radii.append(spectral_radius_diag_split(z))
    frac = float(np.mean(np.asarray(radii) < 1.0))
    yield "mimo.spectral_radius", frac >= 0.99, f"{100 * frac:.1f}% of 200 channels below 1"

    # Scaling table.
    reports = perf_table((16, 32, 64, 128, 256))
    worst_pow = 0.0
    worst_area = 0.0
    from .perf import REFERENCE_ROWS

    for rep in reports:
        ref = REFERENCE_ROWS[rep.m]
        worst_pow = max(worst_pow, abs(rep.soc_w * 1e3 / ref["soc_mw"] - 1))
        worst_area = max(worst_area, abs(rep.area_mm2 / ref["area_mm2"] - 1))
    ok = worst_pow < 0.01 and worst_area < 0.01
    yield "perf.reference_rows", ok, (
        f"worst SoC diff {100 * worst_pow:.2f}%, worst area diff {100 * worst_area:.2f}%"
    )


def cmd_validate(cfg: ExperimentConfig, args) -> int:
    out = _out_dir(args)
    seed = cfg["run.seed"]
    lines = []
    failures = 0
    for name, ok, detail in _validation_checks(cfg):
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        line = f"[{status}] {name}: {detail}"
        lines.append(line)
        print(line)
    summary = f"checks={len(lines)} failures={failures}"
    lines.append(summary)
    print(summary)
    write_text(out / "validation.txt", "\n".join(lines) + "\n", seed)
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siphsim",
        description="WDM photonic linear-algebra accelerator simulator and design calculator",
    )
    parser.add_argument("--version", action="version", version=f"siphsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("plan", "plan the WDM spectrum and resonator geometry"),
        ("mvm", "run matrix-vector multiplies through the signal chain"),
        ("invert", "run the iterative matrix-inverse pipeline"),
        ("mimo", "run the uplink detection bench"),
        ("perf", "emit the power/area/throughput scaling table"),
        ("validate", "run the full cross-module check suite"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="flat key-value config file")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--format", choices=("csv", "jsonl"), default=None)
        p.add_argument("--plots", dest="plots", action="store_true", default=True)
        p.add_argument("--no-plots", dest="plots", action="store_false")
    return parser


COMMANDS = {
    "plan": cmd_plan,
    "mvm": cmd_mvm,
    "invert": cmd_invert,
    "mimo": cmd_mimo,
    "perf": cmd_perf,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.override("run.seed", args.seed)
        if args.format is not None:
            cfg.override("run.format", args.format)
        out = _out_dir(args)
        _record_config(cfg, cfg["run.seed"], out)
        return COMMANDS[args.command](cfg, args)
    except SiphsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
