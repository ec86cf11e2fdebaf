"""Observable time series: fast-oscillation filtering, comparison, CSV export.

The coherent-averaging approximation leaves spurious oscillations at the
beat period 2 pi / |omega_p - omega_c| on top of slower physics; a centered
moving average over exactly that window removes them while leaving the
envelope intact, which is how analytic and numeric curves are meant to be
compared.
"""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, replace

import numpy as np

PROVENANCES = ("analytic", "numeric", "filtered")


@dataclass(frozen=True)
class ObservableSeries:
    """One real observable sampled on a strictly ascending time grid."""

    t: np.ndarray
    y: np.ndarray
    label: str
    provenance: str

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.t.ndim != 1 or self.t.shape != self.y.shape:
            raise ValueError("t and y must be 1-d arrays of equal length")
        if self.t.size < 1:
            raise ValueError("series must not be empty")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("t must be strictly ascending")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")

    def __len__(self) -> int:
        return self.t.size


def filter_fast(series: ObservableSeries, window: float) -> ObservableSeries:
    """Centered moving average over the given time window.

    Near the edges the window shrinks symmetrically so the average stays
    centered; the result carries provenance "filtered".
    """
    spacing = float(np.median(np.diff(series.t))) if len(series) > 1 else 0.0
    if window < 2.0 * spacing or spacing == 0.0:
        raise ValueError(
            f"window {window:g} must be at least twice the median spacing {spacing:g}"
        )
    t, y = series.t, series.y
    half = np.minimum(window / 2.0, np.minimum(t - t[0], t[-1] - t))
    eps = spacing * 1e-9
    lo = np.searchsorted(t, t - half - eps, side="left")
    hi = np.searchsorted(t, t + half + eps, side="right")
    csum = np.concatenate(([0.0], np.cumsum(y)))
    smoothed = (csum[hi] - csum[lo]) / (hi - lo)
    return replace(series, y=smoothed, provenance="filtered")


def compare(a: ObservableSeries, b: ObservableSeries) -> dict:
    """Pointwise metrics after linear resampling to the common time range.

    Returns {"rmse", "max_abs", "relative_l2"}; relative_l2 uses the mean of
    the two series norms in the denominator so the metric is symmetric.
    """
    lo = max(a.t[0], b.t[0])
    hi = min(a.t[-1], b.t[-1])
    if hi <= lo:
        raise ValueError("series time ranges do not overlap")
    grid = np.union1d(a.t, b.t)
    grid = grid[(grid >= lo) & (grid <= hi)]
    ya = np.interp(grid, a.t, a.y)
    yb = np.interp(grid, b.t, b.y)
    diff = ya - yb
    denom = 0.5 * (np.linalg.norm(ya) + np.linalg.norm(yb))
    rel = float(np.linalg.norm(diff) / denom) if denom > 0 else (
        0.0 if not np.any(diff) else math.inf)
    return {
        "rmse": float(np.sqrt(np.mean(diff ** 2))),
        "max_abs": float(np.max(np.abs(diff))),
        "relative_l2": rel,
    }


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the same directory plus rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_series(series: ObservableSeries, path: str) -> None:
    """One series per file: header `t,<label>,<provenance>`, 17 significant digits."""
    lines = [f"t,{series.label},{series.provenance}"]
    lines.extend(f"{t:.17g},{y:.17g}" for t, y in zip(series.t, series.y))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_series_wide(series_list, path: str) -> None:
    """Several series on one shared time grid, one column per series."""
    if not series_list:
        raise ValueError("nothing to write")
    t0 = series_list[0].t
    for s in series_list[1:]:
        if s.t.shape != t0.shape or not np.allclose(s.t, t0, rtol=0, atol=0):
            raise ValueError("wide format requires identical time grids")
    header = "t," + ",".join(f"{s.label}:{s.provenance}" for s in series_list)
    lines = [header]
    for i, t in enumerate(t0):
        row = ",".join(f"{s.y[i]:.17g}" for s in series_list)
        lines.append(f"{t:.17g},{row}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_series(path: str) -> ObservableSeries:
    """Inverse of write_series."""
    with open(path) as f:
        header = f.readline().strip()
        parts = header.split(",")
        if len(parts) != 3 or parts[0] != "t":
            raise ValueError(f"unrecognized series header {header!r}")
        _, label, provenance = parts
        t, y = [], []
        for line in f:
            line = line.strip()
            if not line:
                continue
            a, b = line.split(",")
            t.append(float(a))
            y.append(float(b))
    return ObservableSeries(np.array(t), np.array(y), label, provenance)
