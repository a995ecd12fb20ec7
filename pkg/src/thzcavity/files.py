"""CSV/JSON/SVG readers and writers.

Every file written here starts with a provenance line naming the tool
version and the SHA-256 of the run configuration, so identical inputs give
byte-identical outputs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from thzcavity import __version__
from thzcavity.cavity import CavityMode, FieldMap
from thzcavity.josephson import JosephsonBranch
from thzcavity.radiometry import SourcePowerEstimate

TOOL_NAME = "thzcavity"
MODE_COLUMNS = ("parity", "m", "r", "q", "f_GHz", "residual")


class InputError(ValueError):
    """Malformed input data; the message names the file and line."""


def provenance(config_digest: str, input_digest: str | None = None) -> str:
    line = f"{TOOL_NAME} {__version__} config_sha256={config_digest}"
    if input_digest is not None:
        line += f" input_sha256={input_digest}"
    return line


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _fmt(value: float) -> str:
    # repr round-trips exactly and is platform independent
    return repr(float(value))


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[object]], comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _json_text(payload: dict, comment: str) -> str:
    doc = {"provenance": comment, **payload}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


# ------------------------------------------------------------------ modes


def mode_rows(modes: Sequence[CavityMode]) -> list[tuple[str, ...]]:
    return [
        (md.parity.value, str(md.m), str(md.r), _fmt(md.q_root), f"{md.frequency_GHz:.2f}", f"{md.boundary_residual:.3e}")
        for md in modes
    ]


def write_modes_csv(path: Path, modes: Sequence[CavityMode], digest: str) -> Path:
    return _write(path, _csv_text(MODE_COLUMNS, mode_rows(modes), provenance(digest)))


def write_modes_json(path: Path, modes: Sequence[CavityMode], digest: str, extra: dict | None = None) -> Path:
    payload = {
        "modes": [
            {
                "parity": md.parity.value,
                "m": md.m,
                "r": md.r,
                "q": md.q_root,
                "f_GHz": md.frequency_GHz,
                "residual": md.boundary_residual,
                "char_value": md.solution.char_value,
            }
            for md in modes
        ],
        **(extra or {}),
    }
    return _write(path, _json_text(payload, provenance(digest)))


# ------------------------------------------------------------- field maps


def write_field_csv(path: Path, fmap: FieldMap, digest: str) -> Path:
    """Grid layout: first column y_um, remaining columns one per x_um."""
    header = ["y_um\\x_um", *(_fmt(x) for x in fmap.x_um)]
    rows = []
    for y, row in zip(fmap.y_um, fmap.values):
        rows.append([_fmt(y), *("" if not math.isfinite(v) else f"{v:.9e}" for v in row)])
    comment = provenance(digest) + f" mode={fmap.mode.label} q={_fmt(fmap.mode.q_root)}"
    return _write(path, _csv_text(header, rows, comment))


def diverging_ramp(levels: int = 256) -> list[str]:
    """Blue through white to red, as ``#rrggbb`` strings."""
    out = []
    for i in range(levels):
        t = 2.0 * i / (levels - 1) - 1.0
        if t < 0.0:
            r = g = round(255 * (1.0 + t))
            b = 255
        else:
            r = 255
            g = b = round(255 * (1.0 - t))
        out.append(f"#{r:02x}{g:02x}{b:02x}")
    return out


RAMP = tuple(diverging_ramp())


def field_svg(fmap: FieldMap, digest: str, cell_px: int = 4) -> str:
    values = fmap.values
    finite = values[np.isfinite(values)]
    scale = float(np.max(np.abs(finite))) if finite.size else 1.0
    scale = scale or 1.0
    ny, nx = values.shape
    width, height = nx * cell_px, ny * cell_px
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f"<!-- {provenance(digest)} mode={fmap.mode.label} -->",
    ]
    # row 0 of the image is the largest y
    for i in range(ny):
        row = values[ny - 1 - i]
        for j in range(nx):
            v = row[j]
            if not math.isfinite(v):
                continue
            level = int(round((v / scale + 1.0) * 0.5 * (len(RAMP) - 1)))
            level = min(max(level, 0), len(RAMP) - 1)
            lines.append(
                f'<rect x="{j * cell_px}" y="{i * cell_px}" width="{cell_px}" height="{cell_px}" fill="{RAMP[level]}"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_field_svg(path: Path, fmap: FieldMap, digest: str) -> Path:
    return _write(path, field_svg(fmap, digest))


# ---------------------------------------------------------------- readers


@dataclass(frozen=True)
class CsvRecord:
    line: int
    values: dict[str, str]


def read_csv_records(path: str | Path, required: Sequence[str], optional: Sequence[str] = ()) -> list[CsvRecord]:
    """Rows of a comma-separated file with a header; ``#`` lines are skipped."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    header: list[str] | None = None
    records = []
    for lineno, row in _numbered_rows(text):
        if header is None:
            header = [h.strip() for h in row]
            missing = [c for c in required if c not in header]
            if missing:
                raise InputError(f"{path}:{lineno}: missing column(s) {', '.join(missing)}")
            unknown = [c for c in header if c not in required and c not in optional]
            if unknown:
                raise InputError(f"{path}:{lineno}: unknown column(s) {', '.join(unknown)}")
            continue
        if len(row) != len(header):
            raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        records.append(CsvRecord(lineno, {h: v.strip() for h, v in zip(header, row)}))
    if header is None:
        raise InputError(f"{path}: no header row")
    return records


def _numbered_rows(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, next(csv.reader([line]))


def parse_float(path, record: CsvRecord, column: str, required: bool = True) -> float | None:
    raw = record.values.get(column, "")
    if raw == "":
        if required:
            raise InputError(f"{path}:{record.line}: empty {column}")
        return None
    try:
        value = float(raw)
    except ValueError:
        raise InputError(f"{path}:{record.line}: {column} is not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise InputError(f"{path}:{record.line}: {column} is not finite: {raw!r}")
    return value


def read_branches(path: str | Path) -> dict[str, list[tuple[float, float]]]:
    """Josephson (V, f) points grouped by ``branch_id`` in file order."""
    records = read_csv_records(path, ("voltage_V", "frequency_GHz"), ("temperature_K", "branch_id"))
    branches: dict[str, list[tuple[float, float]]] = {}
    for rec in records:
        volts = parse_float(path, rec, "voltage_V")
        freq = parse_float(path, rec, "frequency_GHz")
        if volts <= 0.0:
            raise InputError(f"{path}:{rec.line}: voltage_V must be positive")
        if freq <= 0.0:
            raise InputError(f"{path}:{rec.line}: frequency_GHz must be positive")
        parse_float(path, rec, "temperature_K", required=False)
        branches.setdefault(rec.values.get("branch_id") or "default", []).append((volts, freq))
    return branches


def read_sweep(path: str | Path) -> list[tuple[float, float, float | None]]:
    """Bolometer sweep rows (bias V, output mV, temperature K or None)."""
    records = read_csv_records(path, ("bias_voltage_V", "output_voltage_mV"), ("temperature_K",))
    rows = []
    for rec in records:
        v_out = parse_float(path, rec, "output_voltage_mV")
        if v_out < 0.0:
            raise InputError(f"{path}:{rec.line}: output_voltage_mV must be >= 0")
        rows.append((parse_float(path, rec, "bias_voltage_V"), v_out, parse_float(path, rec, "temperature_K", False)))
    return rows


# ------------------------------------------------------- report writers


def write_branches_csv(path: Path, branches: Sequence[JosephsonBranch], digest: str, input_digest: str) -> Path:
    rows = [(b.branch_id, str(len(b.points)), str(b.fitted_N), f"{b.residual_rms:.6e}") for b in branches]
    header = ("branch_id", "n_points", "fitted_N", "residual_rms_GHz")
    return _write(path, _csv_text(header, rows, provenance(digest, input_digest)))


def write_photons_csv(path: Path, rows, digest: str, input_digest: str) -> Path:
    header = ("bias_voltage_V", "temperature_K", "power_nW", "photons_per_s", "photons_per_ps", "photons_per_fs")
    out = []
    for bias, temp, power, per_ps in rows:
        per_s = per_ps * 1e12
        out.append((_fmt(bias), "" if temp is None else _fmt(temp), _fmt(power), _fmt(per_s), _fmt(per_ps), _fmt(per_ps * 1e-3)))
    return _write(path, _csv_text(header, out, provenance(digest, input_digest)))


def budget_rows(est: SourcePowerEstimate) -> list[tuple[str, str]]:
    b = est.budget
    rows = [
        ("detected_power_nW", b.detected_power_nW),
        ("measurement_solid_angle_sr", b.measurement_solid_angle_sr),
        ("emission_solid_angle_sr", b.emission_solid_angle_sr),
        ("air_attenuation_dB_per_km", b.air_attenuation_dB_per_km),
        ("path_length_m", b.path_length_m),
        ("frequency_GHz", b.frequency_GHz),
        *est.factors,
        ("source_power_nW", est.source_power_nW),
        ("source_photons_per_s", est.source_photons.per_second),
        ("source_photons_per_ps", est.source_photons.per_ps),
        ("source_photons_per_fs", est.source_photons.per_fs),
        ("detected_photons_per_s", est.detected_photons.per_second),
        ("detected_photons_per_ps", est.detected_photons.per_ps),
    ]
    return [(name, _fmt(value)) for name, value in rows]


def write_budget_csv(path: Path, est: SourcePowerEstimate, digest: str) -> Path:
    return _write(path, _csv_text(("quantity", "value"), budget_rows(est), provenance(digest)))


def write_budget_json(path: Path, est: SourcePowerEstimate, digest: str) -> Path:
    payload = {"budget": {name: float(value) for name, value in budget_rows(est)}}
    return _write(path, _json_text(payload, provenance(digest)))
