"""Parameter sweeps over (Delta, Omega) grids and their CSV/JSON serialization.

Config files are flat ``section.key = value`` text, one assignment per line,
``#`` starting a comment. Recognized keys are listed in ``CONFIG_KEYS``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DegenerateAssignmentError,
    IllConditionedPartitionError,
    NotHermitianError,
    OutputError,
    PoleError,
)
from .frames import DriveSpec
from .operators import PAULI_LABELS, DeviceParams
from .perturbation import GAP_TOL
from .pipeline import cr_poles, effective_cr

log = logging.getLogger(__name__)

AXIS_NAMES = ("Omega", "Delta", "omega1")
FORMATS = ("csv", "json")
METHOD_ALIASES = {"exact": "exact", "pert": "pert", "perturbative": "pert"}
STATUSES = ("ok", "pole", "degenerate", "error")
COLUMNS = ("delta_ghz", "omega_ghz", "method", "order", *PAULI_LABELS, "I_metric", "status")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.points)]


@dataclass(frozen=True)
class SweepConfig:
    device: DeviceParams = field(default_factory=DeviceParams.reference)
    Omega: float = 0.02
    omega_d: Optional[float] = None
    axis1: Optional[Axis] = None
    axis2: Optional[Axis] = None
    method: str = "exact"
    order: int = 3
    gap_tol: float = GAP_TOL
    A: float = 0.0
    phi_c: float = 0.0
    phi_t: float = 0.0
    out: Optional[str] = None
    format: str = "csv"
    threads: int = 1

    def axes(self) -> list[Axis]:
        return [a for a in (self.axis1, self.axis2) if a is not None]

    def echo(self) -> dict:
        """Everything that determines the numbers, none of what only affects IO."""
        out = {f"device.{f.name}": getattr(self.device, f.name) for f in fields(DeviceParams)}
        out.update({"drive.Omega": self.Omega, "drive.omega_d": self.omega_d,
                    "method.name": self.method, "method.order": self.order,
                    "method.gap_tol": self.gap_tol, "crosstalk.A": self.A,
                    "crosstalk.phi_c": self.phi_c, "crosstalk.phi_t": self.phi_t})
        for tag, ax in (("axis1", self.axis1), ("axis2", self.axis2)):
            if ax is not None:
                out.update({f"{tag}.name": ax.name, f"{tag}.start": ax.start,
                            f"{tag}.stop": ax.stop, f"{tag}.points": ax.points})
        # inf is not valid JSON
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in out.items()}


def _float(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise ValueError("NaN is not allowed")
    return v


def _optional_float(text: str) -> Optional[float]:
    return None if text.lower() in ("", "none", "auto") else _float(text)


def _int(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {sorted(options)}, got {text!r}")
        return options[text] if isinstance(options, dict) else text
    return parse


DEVICE_KEYS = {"omega1": _float, "omega2": _float, "delta1": _float, "delta2": _float,
               "g1": _float, "g2": _float, "omega_r": _float, "J": _optional_float,
               "d": _int, "levels": _int}
AXIS_KEYS = {"name": _choice(AXIS_NAMES), "start": _float, "stop": _float, "points": _int}
CONFIG_KEYS = {
    **{f"device.{k}": v for k, v in DEVICE_KEYS.items()},
    "drive.Omega": _float, "drive.omega_d": _optional_float,
    **{f"axis1.{k}": v for k, v in AXIS_KEYS.items()},
    **{f"axis2.{k}": v for k, v in AXIS_KEYS.items()},
    "method.name": _choice(METHOD_ALIASES), "method.order": _int, "method.gap_tol": _float,
    "crosstalk.A": _float, "crosstalk.phi_c": _float, "crosstalk.phi_t": _float,
    "output.path": str, "output.format": _choice(FORMATS), "run.threads": _int,
}


def parse_assignments(text: str) -> list[tuple[int, str, str]]:
    """(line number, key, raw value) for every non-blank, non-comment line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if "." not in key:
            raise ConfigError("key must be of the form section.key", line=lineno, field=key)
        out.append((lineno, key, value))
    return out


def build_config(assignments: Iterable[tuple[Optional[int], str, str]]) -> SweepConfig:
    values: dict = {}
    where: dict = {}
    for lineno, key, raw in assignments:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key; valid keys are {sorted(CONFIG_KEYS)}",
                              line=lineno, field=key)
        try:
            values[key] = CONFIG_KEYS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value {raw!r}: {exc}", line=lineno, field=key) from None
        where[key] = lineno

    def fail(msg, key):
        raise ConfigError(msg, line=where.get(key), field=key)

    dev = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("device.")}
    if "levels" in dev:
        dev["d"] = dev.pop("levels")
    try:
        device = DeviceParams.reference(**dev)
    except (ValueError, TypeError) as exc:
        key = next((k for k in values if k.startswith("device.")), "device")
        fail(str(exc), key)

    axes = {}
    for tag in ("axis1", "axis2"):
        given = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith(tag + ".")}
        if not given:
            continue
        missing = [k for k in AXIS_KEYS if k not in given]
        if missing:
            fail(f"{tag} is missing {', '.join(missing)}", f"{tag}.{missing[0]}")
        if given["points"] < 2:
            fail("points must be >= 2", f"{tag}.points")
        if given["start"] > given["stop"]:
            fail("start must not exceed stop", f"{tag}.start")
        axes[tag] = Axis(**given)
    if "axis1" not in axes:
        fail("a sweep needs at least axis1", "axis1.name")
    if "axis2" in axes and axes["axis2"].name == axes["axis1"].name:
        fail("axis2 repeats axis1", "axis2.name")
    if {a.name for a in axes.values()} == {"Delta", "omega1"}:
        fail("Delta and omega1 both set the control frequency", "axis2.name")

    order = values.get("method.order", 3)
    if order < 1:
        fail("order must be >= 1", "method.order")
    A = values.get("crosstalk.A", 0.0)
    if not 0.0 <= A <= 1.0:
        fail("cross-talk amplitude must lie in [0, 1]", "crosstalk.A")
    threads = values.get("run.threads", 1)
    if threads < 1:
        fail("threads must be >= 1", "run.threads")
    gap_tol = values.get("method.gap_tol", GAP_TOL)
    if gap_tol < 0:
        fail("gap_tol must be >= 0", "method.gap_tol")

    return SweepConfig(device=device, Omega=values.get("drive.Omega", 0.02),
                       omega_d=values.get("drive.omega_d"), axis1=axes["axis1"],
                       axis2=axes.get("axis2"), method=values.get("method.name", "exact"),
                       order=order, gap_tol=gap_tol, A=A,
                       phi_c=values.get("crosstalk.phi_c", 0.0),
                       phi_t=values.get("crosstalk.phi_t", 0.0),
                       out=values.get("output.path"), format=values.get("output.format", "csv"),
                       threads=threads)


def parse_override(text: str) -> tuple[None, str, str]:
    if "=" not in text:
        raise ConfigError(f"override must look like section.key=value, got {text!r}")
    key, value = (s.strip() for s in text.split("=", 1))
    return None, key, value


def load_config(path=None, overrides: Iterable[str] = (), text: Optional[str] = None) -> SweepConfig:
    """Read a config file (or ``text``) and apply ``section.key=value`` overrides on top."""
    if text is None:
        if path is None:
            text = ""
        else:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    assignments = parse_assignments(text) + [parse_override(o) for o in overrides]
    return build_config(assignments)


@dataclass(frozen=True)
class SweepRow:
    delta_ghz: float
    omega_ghz: float
    method: str
    order: Optional[int]
    coefficients_mhz: Optional[dict]
    I_metric: Optional[float]
    status: str
    detail: str = ""

    def record(self) -> dict:
        rec = {"delta_ghz": self.delta_ghz, "omega_ghz": self.omega_ghz,
               "method": self.method, "order": self.order}
        for label in PAULI_LABELS:
            rec[label] = self.coefficients_mhz[label] if self.coefficients_mhz else None
        rec["I_metric"] = self.I_metric
        rec["status"] = self.status
        return rec


def grid(config: SweepConfig) -> list[dict]:
    """Axis assignments in row-major order, axis1 outermost."""
    axes = config.axes()
    points = [{}]
    for ax in axes:
        points = [{**p, ax.name: v} for p in points for v in ax.values()]
    return points


def point_inputs(config: SweepConfig, point: dict) -> tuple[DeviceParams, float]:
    device = config.device
    if "Delta" in point:
        device = replace(device, omega1=device.omega2 + point["Delta"])
    if "omega1" in point:
        device = replace(device, omega1=point["omega1"])
    return device, point.get("Omega", config.Omega)


def evaluate_point(config: SweepConfig, point: dict) -> SweepRow:
    device, Omega = point_inputs(config, point)
    Delta = device.detuning
    order = config.order if config.method == "pert" else None
    base = dict(delta_ghz=Delta, omega_ghz=Omega, method=config.method, order=order)

    def bad(status, exc):
        log.info("Delta=%.9g Omega=%.9g: %s (%s)", Delta, Omega, status, exc)
        return SweepRow(coefficients_mhz=None, I_metric=None, status=status,
                        detail=str(exc), **base)

    for name, pole in cr_poles(device.delta1).items():
        if abs(Delta - pole) <= config.gap_tol:
            return bad("pole", f"within gap_tol of {name}")
    drive = DriveSpec.cr(Omega, A=config.A, phi_c=config.phi_c, phi_t=config.phi_t,
                         omega_d=config.omega_d)
    try:
        table = effective_cr(device, drive, method=config.method, order=config.order,
                             gap_tol=config.gap_tol)
    except PoleError as exc:
        return bad("pole", exc)
    except (DegenerateAssignmentError, IllConditionedPartitionError) as exc:
        return bad("degenerate", exc)
    except (FloatingPointError, NotHermitianError, np.linalg.LinAlgError) as exc:
        return bad("error", exc)
    coeffs = table.mhz()
    if not all(math.isfinite(v) for v in coeffs.values()) or not math.isfinite(table.I_metric):
        return bad("error", "non-finite result")
    return SweepRow(coefficients_mhz=coeffs, I_metric=table.I_metric, status="ok", **base)


def run_sweep(config: SweepConfig, threads: Optional[int] = None,
              progress: Optional[Callable[[int, int], None]] = None) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in grid order whatever the thread count."""
    points = grid(config)
    threads = config.threads if threads is None else threads
    if threads <= 1:
        rows = []
        for k, p in enumerate(points):
            rows.append(evaluate_point(config, p))
            if progress:
                progress(k + 1, len(points))
        return rows
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: evaluate_point(config, p), points))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.9g" % v
    return str(v)


def to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        rec = row.record()
        w.writerow([_cell(rec[c]) for c in COLUMNS])
    return buf.getvalue()


def to_json(rows: Iterable[SweepRow], config: Optional[SweepConfig] = None) -> str:
    meta = {"library": "crgate", "version": __version__, "columns": list(COLUMNS)}
    if config is not None:
        meta["d"] = config.device.d
        meta["config"] = config.echo()
    doc = {"metadata": meta, "records": [r.record() for r in rows]}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit(rows: Iterable[SweepRow], fmt: str = "csv", path=None,
         config: Optional[SweepConfig] = None) -> str:
    """Serialize ``rows``; write to ``path`` when given. Returns the text."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    text = to_csv(rows) if fmt == "csv" else to_json(rows, config)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OutputError(exc.strerror or str(exc), path=str(path)) from None
    return text


def _csv_value(column: str, text: str):
    if column in ("method", "status"):
        return text
    if text == "":
        return None
    if column == "order":
        return int(text)
    return float(text)


def parse_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    return [{c: _csv_value(c, t) for c, t in zip(COLUMNS, line)} for line in reader]


def parse_json(text: str) -> tuple[dict, list[dict]]:
    doc = json.loads(text)
    return doc["metadata"], doc["records"]
