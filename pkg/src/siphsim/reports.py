"""Delimited output writers. Every file starts with a tool/seed header."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from . import __version__


def header_line(seed: int) -> str:
    return f"# siphsim {__version__} seed={seed}"


def render_records(columns, rows, seed: int, fmt: str = "csv") -> str:
    """
    Render rows (sequences aligned with ``columns``) as csv or jsonl text.

    The first line always names the tool version and resolved seed; for
    jsonl it is a JSON header object instead of a comment.
    """
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(header_line(seed) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])
        return buf.getvalue()
    if fmt == "jsonl":
        lines = [json.dumps({"tool": "siphsim", "version": __version__, "seed": seed})]
        for row in rows:
            lines.append(json.dumps(dict(zip(columns, row))))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format: {fmt}")


def write_records(path: Path, columns, rows, seed: int, fmt: str = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_records(columns, rows, seed, fmt))
    return path


def write_text(path: Path, text: str, seed: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(header_line(seed) + "\n" + text)
    return path
