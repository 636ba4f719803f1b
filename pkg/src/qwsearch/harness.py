"""Trajectory runs over experiment specs and CSV/JSON emission."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ExperimentSpec
from .errors import NumericalViolation, QWSearchError
from .walk import _query_sign, _step, marked_arc_mask, uniform_state

log = logging.getLogger(__name__)

COLUMNS = ("t", "overlap", "p_m", "residual")


@dataclass
class TimeSeries:
    """Per-step measurements; ``columns`` maps a measure name to its values."""

    t: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, key: str) -> np.ndarray:
        return self.t if key == "t" else self.columns[key]

    @property
    def header(self) -> list[str]:
        return ["t"] + [c for c in COLUMNS[1:] if c in self.columns]

    def rows(self):
        cols = [self[c] for c in self.header]
        for i in range(len(self.t)):
            yield tuple(col[i] for col in cols)


def _default_norm_tol(steps: int) -> float:
    return 1e-10 * max(1.0, steps / 1000)


def run_experiment(spec: ExperimentSpec) -> TimeSeries:
    """Evolve the uniform state under ``S C Q`` for ``spec.steps`` steps.

    Row 0 is the initial state.  Raises ``NumericalViolation`` if the final
    norm drifts from 1 by more than the spec's tolerance.
    """
    graph, marked = spec.build()
    psi0 = uniform_state(graph).amplitudes
    mask = marked_arc_mask(graph, marked)
    sign = _query_sign(graph, marked)
    T = spec.steps
    want = set(spec.measures)
    cols = {m: np.empty(T + 1) for m in COLUMNS[1:] if m in want}

    # normalising by the computed <psi0|psi0> makes row 0 exactly 1
    ref_norm2 = float(np.dot(psi0, psi0))
    x = psi0
    for t in range(T + 1):
        if "overlap" in cols:
            cols["overlap"][t] = abs(float(np.dot(psi0, x))) / ref_norm2
        if "p_m" in cols:
            xm = x[mask]
            cols["p_m"][t] = float(np.dot(xm, xm))
        if t == T and "residual" not in cols:
            break
        nxt = _step(graph, x, sign)
        if "residual" in cols:
            cols["residual"][t] = float(np.linalg.norm(nxt - x))
        if t < T:
            x = nxt

    drift = abs(float(np.linalg.norm(x)) - 1.0)
    tol = spec.norm_tol if spec.norm_tol is not None else _default_norm_tol(T)
    if drift > tol:
        raise NumericalViolation(f"{spec.name}: norm drift {drift:.3e} exceeds {tol:.1e}")
    return TimeSeries(np.arange(T + 1), cols, spec.metadata())


def _run_collect(spec: ExperimentSpec):
    try:
        return run_experiment(spec)
    except QWSearchError as exc:
        return exc


def run_suite(specs: Sequence[ExperimentSpec], *, fail_fast: bool = True,
              workers: int = 1) -> list:
    """Run specs independently; results follow input order.

    With ``fail_fast=False`` a failing spec yields its exception in place of a
    ``TimeSeries`` instead of aborting the suite.
    """
    fn = run_experiment if fail_fast else _run_collect
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, specs))
    return [fn(s) for s in specs]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def to_csv(series: TimeSeries) -> str:
    """CSV text: ``# key: value`` metadata lines, then a header and 17-digit rows."""
    buf = io.StringIO()
    for k, v in series.metadata.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(series.header)
    for row in series.rows():
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def to_json(series: TimeSeries) -> str:
    doc = {
        "metadata": series.metadata,
        "columns": series.header,
        "rows": [[int(r[0])] + [float(x) for x in r[1:]] for r in series.rows()],
    }
    return json.dumps(doc, indent=1) + "\n"


def emit(series: TimeSeries, fmt: str, path: str | Path) -> Path:
    path = Path(path)
    if fmt == "csv":
        text = to_csv(series)
    elif fmt == "json":
        text = to_json(series)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    log.info("wrote %s", path)
    return path


def read_series(path: str | Path) -> TimeSeries:
    """Inverse of :func:`emit` for either format (chosen by file suffix)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        doc = json.loads(text)
        data = np.array(doc["rows"], dtype=float).reshape(-1, len(doc["columns"]))
        header, meta = doc["columns"], doc["metadata"]
    else:
        meta = {}
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                k, _, v = line[1:].partition(":")
                meta[k.strip()] = v.strip()
            else:
                body.append(line)
        rows = list(csv.reader(body))
        header = rows[0]
        data = np.array(rows[1:], dtype=float).reshape(-1, len(header))
    cols = {h: data[:, i] for i, h in enumerate(header) if h != "t"}
    return TimeSeries(data[:, 0].astype(int), cols, meta)
