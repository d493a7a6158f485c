"""
Figure rendering for the report paths.

matplotlib is imported lazily so the numeric library never pays for it;
all figures land as PNG files next to the delimited data they illustrate.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plan_spectrum_figure(plan, mat, path: Path, mma_plan=None) -> Path:
    plt = _plt()
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.stem(plan.lambdas_nm, np.ones(plan.m), basefmt=" ", label="carriers")
    if mma_plan is not None:
        ax1.stem(
            mma_plan.lambdas_nm,
            0.6 * np.ones(mma_plan.m),
            linefmt="C1-",
            markerfmt="C1^",
            basefmt=" ",
            label="offset comb",
        )
    ax1.set_ylabel("comb line")
    ax1.legend(loc="lower right")
    ax1.set_title(
        f"M={plan.m}  L_rtr={plan.l_rtr_um:.2f} um  "
        f"band {plan.lambdas_nm[0]:.2f}-{plan.lambdas_nm[-1]:.2f} nm"
    )
    ax2.plot(plan.lambdas_nm, plan.spacings_nm, "o-")
    ax2.set_xlabel("wavelength [nm]")
    ax2.set_ylabel("channel spacing [nm]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def calibration_figure(table, path: Path) -> Path:
    plt = _plt()
    codes = np.arange(len(table.gains))
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    axes[0].plot(codes, table.raw_gains, "k^-", label="raw")
    axes[0].plot(codes, table.gains, "bo-", label="calibrated")
    axes[0].set_xlabel("code")
    axes[0].set_ylabel("power gain")
    axes[0].legend()
    axes[1].plot(codes, table.raw_dnl, "k^-", label="raw")
    axes[1].plot(codes, table.dnl, "bo-", label="calibrated")
    axes[1].axhline(0.5, color="r", ls="--", lw=0.8)
    axes[1].axhline(-0.5, color="r", ls="--", lw=0.8)
    axes[1].set_xlabel("code")
    axes[1].set_ylabel("DNL [LSB]")
    axes[2].plot(codes, table.raw_inl, "k^-", label="raw")
    axes[2].plot(codes, table.inl, "bo-", label="calibrated")
    axes[2].axhline(0.5, color="r", ls="--", lw=0.8)
    axes[2].axhline(-0.5, color="r", ls="--", lw=0.8)
    axes[2].set_xlabel("code")
    axes[2].set_ylabel("INL [LSB]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def neumann_residual_figure(run, path: Path) -> Path:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    k = np.arange(1, len(run.residuals) + 1)
    ax.semilogy(k, run.residuals, "o-")
    ax.set_xlabel("repetitions k")
    ax.set_ylabel("||I - Y[k] Z||_F / sqrt(M)")
    ax.set_title(f"spectral radius {run.spectral_radius:.3f}")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def mimo_sweep_figure(rows, path: Path) -> Path:
    plt = _plt()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    by_key = {}
    for r in rows:
        by_key.setdefault((r.fidelity, r.snr_db, r.k), []).append(r)
    # inversion error vs k at each snr (fidelity-averaged view)
    snrs = sorted({r.snr_db for r in rows})
    fids = sorted({r.fidelity for r in rows})
    ks = sorted({r.k for r in rows})
    for fid in fids:
        for snr in snrs:
            errs = [
                np.mean([x.inversion_rel_error for x in by_key[(fid, snr, k)]])
                for k in ks
            ]
            ax1.semilogy(ks, errs, "o-", label=f"{fid} {snr:g} dB")
            sers = [
                np.mean([x.ser for x in by_key[(fid, snr, k)]]) for k in ks
            ]
            ax2.semilogy(ks, np.maximum(sers, 1e-6), "s-", label=f"{fid} {snr:g} dB")
    ax1.set_xlabel("k")
    ax1.set_ylabel("inverse rel. error")
    ax1.grid(alpha=0.3)
    ax1.legend(fontsize=7)
    ax2.set_xlabel("k")
    ax2.set_ylabel("SER (floor 1e-6)")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def perf_scaling_figure(reports, asic_ref, path: Path) -> Path:
    plt = _plt()
    ms = [r.m for r in reports]
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    axes[0].loglog(ms, [r.soc_w * 1e3 for r in reports], "o-")
    axes[0].set_xlabel("M")
    axes[0].set_ylabel("SoC power [mW]")
    axes[1].semilogx(ms, [r.density_tmacs_per_mm2 for r in reports], "o-")
    axes[1].axhline(asic_ref["density"], color="r", ls="--", label=asic_ref["name"])
    axes[1].set_xlabel("M")
    axes[1].set_ylabel("TMAC/s/mm$^2$")
    axes[1].legend()
    axes[2].loglog(ms, [r.energy_fj_per_mac for r in reports], "o-")
    axes[2].axhline(asic_ref["energy_fj"], color="r", ls="--", label=asic_ref["name"])
    axes[2].set_xlabel("M")
    axes[2].set_ylabel("fJ/MAC")
    axes[2].legend()
    for ax in axes:
        ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
