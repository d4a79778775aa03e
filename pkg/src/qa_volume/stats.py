"""Ensemble aggregation and power-law fitting."""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np

AXIS_KINDS = ("time", "subsystem-size", "system-size", "window-length", "p")


class AxisMismatch(ValueError):
    pass


class EnsembleSeries:
    """Per-axis-point streaming mean and variance (Welford/Chan updates).

    ``accumulate`` takes one sample per axis point (``nan`` entries are
    skipped), so points may have different counts.
    """

    def __init__(self, axis, kind: str = "time"):
        if kind not in AXIS_KINDS:
            raise ValueError(f"axis kind must be one of {AXIS_KINDS}")
        self.kind = kind
        self.axis = np.asarray(axis, dtype=float)
        n = self.axis.shape[0]
        self.count = np.zeros(n, dtype=np.int64)
        self.mean = np.zeros(n)
        self.m2 = np.zeros(n)

    def accumulate(self, sample) -> None:
        x = np.asarray(sample, dtype=float)
        if x.shape != self.axis.shape:
            raise AxisMismatch(f"sample shape {x.shape} does not match axis {self.axis.shape}")
        ok = ~np.isnan(x)
        self.count[ok] += 1
        delta = np.where(ok, x - self.mean, 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            self.mean += np.where(ok, delta / np.maximum(self.count, 1), 0.0)
        self.m2 += np.where(ok, delta * (np.where(ok, x, 0.0) - self.mean), 0.0)

    def extend(self, samples) -> None:
        for s in samples:
            self.accumulate(s)

    def merge(self, other: "EnsembleSeries") -> None:
        if other.kind != self.kind or other.axis.shape != self.axis.shape or not np.array_equal(other.axis, self.axis):
            raise AxisMismatch("cannot merge series over different axes")
        n = self.count + other.count
        delta = other.mean - self.mean
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(n > 0, other.count / np.maximum(n, 1), 0.0)
        self.mean = self.mean + delta * w
        self.m2 = self.m2 + other.m2 + delta**2 * self.count * w
        self.count = n

    @property
    def variance(self) -> np.ndarray:
        """Population variance ``<x^2> - <x>^2``; ``nan`` where empty."""
        with np.errstate(invalid="ignore", divide="ignore"):
            v = np.where(self.count > 0, self.m2 / np.maximum(self.count, 1), np.nan)
        return np.maximum(v, 0.0)

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.variance)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "mean", "stddev", "n"])
        for x, m, s, n in zip(self.axis, self.mean, self.std, self.count):
            w.writerow([_fmt(x), _fmt(m), _fmt(s), int(n)])
        return buf.getvalue()

    @classmethod
    def from_samples(cls, axis, samples, kind: str = "time") -> "EnsembleSeries":
        out = cls(axis, kind)
        out.extend(samples)
        return out


def _fmt(v) -> str:
    v = float(v)
    if np.isnan(v):
        return "nan"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


@dataclass
class FitResult:
    exponent: float
    prefactor: float
    stderr: float
    fit_range: tuple
    n_points: int
    r2: float

    def to_json(self) -> str:
        d = asdict(self)
        d["fit_range"] = [float(v) for v in self.fit_range]
        return json.dumps(d, sort_keys=True)


MIN_POINTS = 4


def fit_power_law(x, y, fit_range=None, min_points: int = MIN_POINTS) -> FitResult:
    """Least squares of ``log y`` on ``log x``; ``y = prefactor * x**exponent``.

    ``fit_range`` is an inclusive ``(lo, hi)`` window on ``x``; when omitted
    the central decade of the positive axis is used (for axes shorter than
    a decade, the whole positive axis).  Points with ``x <= 0`` or
    ``y <= 0`` (or ``nan``) in range are dropped with a warning.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y differ in shape")
    if fit_range is None:
        fit_range = default_window(x)
    lo, hi = fit_range
    sel = (x >= lo) & (x <= hi)
    bad = sel & ~((x > 0) & (y > 0) & np.isfinite(y))
    if bad.any():
        warnings.warn(f"excluding {int(bad.sum())} nonpositive points from the fit", stacklevel=2)
    sel &= ~bad
    if sel.sum() < min_points:
        raise ValueError(f"fit needs at least {min_points} usable points, got {int(sel.sum())}")
    lx, ly = np.log(x[sel]), np.log(y[sel])
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    slope, icpt = coef
    resid = ly - A @ coef
    n = int(sel.sum())
    sxx = np.sum((lx - lx.mean()) ** 2)
    dof = n - 2
    stderr = float(np.sqrt(np.sum(resid**2) / dof / sxx)) if dof > 0 and sxx > 0 else float("nan")
    sst = np.sum((ly - ly.mean()) ** 2)
    r2 = float(1 - np.sum(resid**2) / sst) if sst > 0 else 1.0
    return FitResult(float(slope), float(np.exp(icpt)), stderr, (float(lo), float(hi)), n, r2)


def default_window(x) -> tuple[float, float]:
    """Central decade of the positive part of ``x`` (or all of it if shorter)."""
    pos = np.asarray(x, dtype=float)
    pos = pos[pos > 0]
    if pos.size == 0:
        return (0.0, 0.0)
    lo, hi = pos.min(), pos.max()
    if hi / lo <= 10:
        return (float(lo), float(hi))
    mid = np.sqrt(lo * hi)
    return (float(mid / np.sqrt(10)), float(mid * np.sqrt(10)))


def extract_distance_exponent(points, min_sizes: int = MIN_POINTS) -> FitResult:
    """Fit ``d ~ L**gamma`` over ``(L, d)`` pairs; distances below 1 are dropped."""
    pts = [(float(L), float(d)) for L, d in points]
    if len({L for L, _ in pts}) < min_sizes:
        raise ValueError(f"need at least {min_sizes} system sizes")
    Ls = np.array([p[0] for p in pts])
    ds = np.array([p[1] for p in pts])
    keep = ds >= 1
    if (~keep).any():
        warnings.warn("dropping distances below 1", stacklevel=2)
    return fit_power_law(Ls[keep], ds[keep], (Ls.min(), Ls.max()), min_points=min_sizes)


def crossing_point(xs, ya, yb) -> float | None:
    """First ``x`` where ``ya - yb`` changes sign, by linear interpolation."""
    d = np.asarray(ya, dtype=float) - np.asarray(yb, dtype=float)
    xs = np.asarray(xs, dtype=float)
    for i in range(len(d) - 1):
        if d[i] == 0:
            return float(xs[i])
        if d[i] * d[i + 1] < 0:
            return float(xs[i] + (xs[i + 1] - xs[i]) * d[i] / (d[i] - d[i + 1]))
    return None


def write_csv(path, series: EnsembleSeries) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(series.to_csv())


def write_fit(path, fit: FitResult) -> None:
    with open(path, "w") as fh:
        fh.write(fit.to_json() + "\n")
