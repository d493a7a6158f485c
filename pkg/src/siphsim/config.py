"""
Flat key-value experiment configuration.

Format: one ``section.key = value`` per line; ``#`` starts a comment. The
key set is closed per section so typos fail loudly, and every run writes the
fully-resolved configuration next to its outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _int_list(text: str):
    return [int(tok) for tok in text.replace(",", " ").split()]


def _float_list(text: str):
    return [float(tok) for tok in text.replace(",", " ").split()]


# section.key -> (parser, default)
SCHEMA = {
    "run.seed": (int, 0),
    "run.format": (str, "csv"),
    "planner.m": (int, 32),
    "planner.lambda_max_nm": (float, 1550.0),
    "planner.delta_lambda_target_nm": (float, 0.5),
    "planner.q_mrm": (float, 8000.0),
    "material.band_lo_nm": (float, 1534.5),
    "material.band_hi_nm": (float, 1550.0),
    "material.n_g_lo": (float, 5.02),
    "material.n_g_hi": (float, 4.98),
    "material.n_eff_hi": (float, 3.73115),
    "devices.l_bits": (int, 4),
    "devices.v_ddh": (float, 2.4),
    "devices.r_hs": (float, 2000.0),
    "devices.r_u": (float, 310937.5),
    "devices.mrm_shift_rate_nm_per_v": (float, 0.04),
    "devices.mrm_q": (float, 8000.0),
    "devices.g_m_ind": (float, 22e-3),
    "devices.dr_oe_uw": (float, 670.0),
    "engine.clock_ghz": (float, 2.0),
    "engine.fidelity": (str, "device"),
    "engine.trials": (int, 100),
    "engine.exhaustive": (_bool, False),
    "engine.operands_file": (str, ""),
    "neumann.m": (int, 8),
    "neumann.k_max": (int, 6),
    "neumann.fidelity": (str, "float"),
    "neumann.requantize": (_bool, True),
    "neumann.mmm_mode": (str, "parallel"),
    "neumann.diag_dominance": (float, 4.0),
    "mimo.n_antennas": (int, 64),
    "mimo.n_users": (int, 8),
    "mimo.qam_order": (int, 16),
    "mimo.trials": (int, 100),
    "mimo.k_values": (_int_list, [1, 2, 3, 4, 6, 8]),
    "mimo.snr_db_values": (_float_list, [10.0, 15.0, 20.0]),
    "mimo.fidelities": (str, "float"),
    "perf.m_values": (_int_list, [8, 16, 32, 64, 128, 256]),
}


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        resolved = {key: default for key, (_, default) in SCHEMA.items()}
        for key, value in self.values.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown configuration key: {key}")
            resolved[key] = value
        self.values = resolved

    def __getitem__(self, key: str):
        if key not in SCHEMA:
            raise ConfigError(f"unknown configuration key: {key}")
        return self.values[key]

    def override(self, key: str, value):
        if key not in SCHEMA:
            raise ConfigError(f"unknown configuration key: {key}")
        self.values[key] = value

    def dump(self) -> str:
        lines = [f"{key} = {_fmt(self.values[key])}" for key in sorted(self.values)]
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return str(value)


def parse_config_text(text: str) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown configuration key: {key}")
        parser, _ = SCHEMA[key]
        try:
            values[key] = parser(val)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val}") from exc
    return ExperimentConfig(values)


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    return parse_config_text(Path(path).read_text())
