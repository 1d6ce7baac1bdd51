"""CSV and text serialization of sweeps, traces, pole tables and reports.

Numbers are written with 12 significant digits (``%.12g``); readers parse
them back into the same structures.
"""

from __future__ import annotations

import csv
import math
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .equalizer import SimulationTrace
from .poles import PoleEstimate
from .signal_model import TWO_PI
from .tf import SweepTable
from .validation import CheckResult, ValidationReport

SWEEP_HEADER = ["f", "re", "im", "mag", "phase", "flag"]
POLE_HEADER = ["sensor", "tone_f", "radius", "angle", "peak", "flag"]
REPORT_HEADER = ["check_id", "scenario_id", "measured", "expected", "tolerance", "status", "note"]


def fmt(x) -> str:
    return "%.12g" % x


@contextmanager
def _open(path, mode):
    if str(path) == "-":
        yield sys.stdout if "w" in mode else sys.stdin
        return
    path = Path(path)
    try:
        with path.open(mode, newline="") as fh:
            yield fh
    except OSError as exc:
        raise OSError(exc.errno, f"cannot {'write' if 'w' in mode else 'read'} {path}: {exc.strerror}") from exc


def _rows(path):
    with _open(path, "r") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        return header, list(reader)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def write_sweep_csv(path, table: SweepTable) -> None:
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for f, h, flag in zip(table.freqs, table.values, table.flags):
            w.writerow([fmt(f), fmt(h.real), fmt(h.imag), fmt(abs(h)), fmt(math.atan2(h.imag, h.real)), flag])


def read_sweep_csv(path, sensor: int = 0) -> SweepTable:
    header, rows = _rows(path)
    if header != SWEEP_HEADER:
        raise ValueError(f"{path}: not a sweep table (header {header})")
    freqs = np.array([float(r[0]) for r in rows])
    values = np.array([complex(float(r[1]), float(r[2])) for r in rows], dtype=complex)
    flags = [r[5] for r in rows]
    return SweepTable(freqs, values, flags, sensor, failed=flags.count("failed"))


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


def write_trace_csv(path, trace: SimulationTrace, decimation: int = 1) -> None:
    """Rows ``n, d_1..d_K, e_1..e_K`` for every ``decimation``-th sample."""
    if decimation < 1:
        raise ValueError("decimation must be >= 1")
    K = trace.n_sensors
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", *(f"d_{k + 1}" for k in range(K)), *(f"e_{k + 1}" for k in range(K))])
        for n in range(0, trace.steps, decimation):
            w.writerow([n, *map(fmt, trace.d[n]), *map(fmt, trace.e[n])])


def read_trace_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample indices and the ``d`` and ``e`` columns as (N, K) arrays."""
    header, rows = _rows(path)
    if not header or header[0] != "n" or len(header) % 2 != 1:
        raise ValueError(f"{path}: not a trace table (header {header})")
    K = (len(header) - 1) // 2
    data = np.array([[float(x) for x in r] for r in rows]).reshape(len(rows), 2 * K + 1)
    return data[:, 0].astype(int), data[:, 1:K + 1], data[:, K + 1:]


# ---------------------------------------------------------------------------
# poles
# ---------------------------------------------------------------------------


def write_pole_csv(path, estimates) -> None:
    """One row per estimate; sensors are numbered from 1, radius is blank when flagged."""
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POLE_HEADER)
        for e in estimates:
            w.writerow([
                e.sensor + 1, fmt(e.angle / TWO_PI), "" if e.radius is None else fmt(e.radius),
                fmt(e.angle), fmt(e.peak), e.flag,
            ])


def read_pole_csv(path) -> list[PoleEstimate]:
    header, rows = _rows(path)
    if header != POLE_HEADER:
        raise ValueError(f"{path}: not a pole table (header {header})")
    out = []
    tones: dict[str, int] = {}
    for r in rows:
        tone = tones.setdefault(r[1], len(tones))
        out.append(PoleEstimate(
            sensor=int(r[0]) - 1, tone=tone, radius=float(r[2]) if r[2] else None,
            angle=float(r[3]), peak=float(r[4]), resolution=math.nan, flag=r[5],
        ))
    return out


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def write_report(path, report: ValidationReport) -> None:
    """CSV when ``path`` ends in ``.csv``, plain text otherwise."""
    if Path(path).suffix.lower() != ".csv":
        with _open(path, "w") as fh:
            fh.write(report.to_text() + "\n")
        return
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for e in report.entries:
            w.writerow([e.check_id, e.scenario_id, fmt(e.measured), fmt(e.expected), fmt(e.tolerance), e.status, e.note])


def read_report_csv(path) -> ValidationReport:
    header, rows = _rows(path)
    if header != REPORT_HEADER:
        raise ValueError(f"{path}: not a report table (header {header})")
    rep = ValidationReport()
    for r in rows:
        rep.entries.append(CheckResult(r[0], r[1], float(r[2]), float(r[3]), float(r[4]), r[5], r[6]))
    return rep
