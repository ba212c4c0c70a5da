"""CSV readers/writers for survival, theory and sweep curves.

All files are UTF-8 with ``\\n`` line endings and full-precision
(shortest-round-trip) decimal floats.  Metadata lives in ``# key: value``
comment lines above the column header; bodies carry no timestamps, so runs
with identical configuration and seed are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .ensembles import EnsembleSpec
from .errors import ComparisonError
from .spectral import SurvivalCurve
from .theory import TheoryCurve

__all__ = [
    "write_survival_csv",
    "read_survival_csv",
    "write_theory_csv",
    "read_theory_csv",
    "write_sweep_csv",
    "read_sweep_csv",
]


def _fmt(x) -> str:
    return repr(float(x))


def _header_lines(kind: str, meta: dict) -> list[str]:
    lines = [f"# leveldot-{kind} v1", f"# version: leveldot/{__version__}"]
    for key, value in meta.items():
        if value is None:
            continue
        if isinstance(value, dict):
            value = json.dumps(value, sort_keys=True, separators=(",", ":"))
        lines.append(f"# {key}: {value}")
    return lines


def _parse_header(path: Path) -> tuple[dict, list[str], list[str]]:
    meta: dict[str, str] = {}
    rows: list[str] = []
    columns: list[str] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ComparisonError(f"cannot read curve file {path}: {exc}") from exc
    for line in text.splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if ": " in body:
                key, value = body.split(": ", 1)
                meta[key] = value
            continue
        if not line.strip():
            continue
        if not columns:
            columns = line.split(",")
        else:
            rows.append(line)
    if not columns:
        raise ComparisonError(f"{path}: no column header found")
    return meta, columns, rows


def _require_columns(path: Path, columns: list[str], expected: list[str]):
    if columns != expected:
        raise ComparisonError(
            f"{path}: unexpected columns {columns}; expected {expected}")


def write_survival_csv(path, curve: SurvivalCurve, extra_meta: dict | None = None) -> Path:
    path = Path(path)
    meta = {"spec": curve.spec.to_dict(), "master_seed": curve.master_seed}
    meta.update(extra_meta or {})
    lines = _header_lines("survival", meta)
    lines.append("tau,t,p_mean,p_stderr,n")
    for i in range(curve.tau.size):
        lines.append(",".join([
            _fmt(curve.tau[i]), _fmt(curve.t[i]), _fmt(curve.mean[i]),
            _fmt(curve.stderr[i]), str(curve.samples),
        ]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_survival_csv(path) -> SurvivalCurve:
    path = Path(path)
    meta, columns, rows = _parse_header(path)
    _require_columns(path, columns, ["tau", "t", "p_mean", "p_stderr", "n"])
    data = np.array([[float(x) for x in row.split(",")] for row in rows])
    spec = EnsembleSpec.from_dict(json.loads(meta["spec"]))
    return SurvivalCurve(
        tau=data[:, 0], t=data[:, 1], mean=data[:, 2], stderr=data[:, 3],
        samples=int(data[0, 4]) if len(rows) else 0, spec=spec,
        master_seed=int(meta.get("master_seed", 0)))


def write_theory_csv(path, curve: TheoryCurve, extra_meta: dict | None = None) -> Path:
    path = Path(path)
    lines = _header_lines("theory", extra_meta or {})
    lines.append("tau,p_theory,quad_err,formula,gamma,class")
    for i in range(curve.tau.size):
        lines.append(",".join([
            _fmt(curve.tau[i]), _fmt(curve.values[i]), _fmt(curve.errors[i]),
            curve.formula, _fmt(curve.gamma), curve.cls,
        ]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_theory_csv(path) -> TheoryCurve:
    path = Path(path)
    meta, columns, rows = _parse_header(path)
    _require_columns(path, columns, ["tau", "p_theory", "quad_err", "formula", "gamma", "class"])
    parts = [row.split(",") for row in rows]
    if not parts:
        raise ComparisonError(f"{path}: empty theory curve")
    return TheoryCurve(
        tau=np.array([float(p[0]) for p in parts]),
        values=np.array([float(p[1]) for p in parts]),
        errors=np.array([float(p[2]) for p in parts]),
        formula=parts[0][3], gamma=float(parts[0][4]), cls=parts[0][5])


SWEEP_COLUMNS = ["gamma", "p_late", "p_late_stderr", "n",
                 "p_residence", "p_golden_rule", "window_lo", "window_hi"]


def write_sweep_csv(path, table: list[dict], extra_meta: dict | None = None) -> Path:
    """Stationary-limit table: one row per coupling gamma."""
    path = Path(path)
    lines = _header_lines("sweep", extra_meta or {})
    lines.append(",".join(SWEEP_COLUMNS))
    for row in table:
        lines.append(",".join(
            str(row[c]) if c == "n" else _fmt(row[c]) for c in SWEEP_COLUMNS))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_sweep_csv(path) -> list[dict]:
    path = Path(path)
    meta, columns, rows = _parse_header(path)
    _require_columns(path, columns, SWEEP_COLUMNS)
    table = []
    for row in rows:
        cells = row.split(",")
        entry = {c: float(v) for c, v in zip(SWEEP_COLUMNS, cells)}
        entry["n"] = int(entry["n"])
        table.append(entry)
    return table
