"""Order statistics and Gaussian kernel density estimates.

Quartiles use linear interpolation between order statistics (position
p*(n-1), the common "type 7" rule). KDE uses a Gaussian kernel with the
Silverman-style bandwidth 0.9 * min(sigma, IQR/1.34) * n^(-1/5) (population
sigma, falling back to h=1 when the rule collapses to 0) sampled on a
128-point grid spanning [min-3h, max+3h].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, LengthMismatch, NonFiniteBandwidth, NonFiniteInput

GRID_POINTS = 128


@dataclass(frozen=True)
class BoxStats:
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def to_json(self) -> dict:
        return {"n": self.n, "min": self.min, "q1": self.q1,
                "median": self.median, "q3": self.q3, "max": self.max}


@dataclass(frozen=True)
class DensityCurve:
    xs: np.ndarray
    ys: np.ndarray
    bandwidth: float
    n: int

    def to_json(self) -> dict:
        return {"xs": self.xs.tolist(), "ys": self.ys.tolist(),
                "bandwidth": self.bandwidth, "n": self.n}


def _as_clean_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise EmptyInput("need at least one value")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("values contain NaN or infinity")
    return arr


def quantile_type7(sorted_values: np.ndarray, p: float) -> float:
    """Linear interpolation between order statistics at position p*(n-1)."""
    pos = p * (sorted_values.size - 1)
    lo = int(math.floor(pos))
    frac = pos - lo
    if frac == 0.0:
        return float(sorted_values[lo])
    return float(sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]))


def box_stats(values) -> BoxStats:
    arr = np.sort(_as_clean_array(values))
    return BoxStats(
        n=int(arr.size),
        min=float(arr[0]),
        q1=quantile_type7(arr, 0.25),
        median=quantile_type7(arr, 0.50),
        q3=quantile_type7(arr, 0.75),
        max=float(arr[-1]),
    )


def silverman_bandwidth(arr: np.ndarray) -> float:
    sigma = float(np.std(arr))
    iqr = float(np.percentile(arr, 75) - np.percentile(arr, 25))
    h = 0.9 * min(sigma, iqr / 1.34) * arr.size ** (-1 / 5)
    return h if h > 0 else 1.0


def gaussian_kde_pdf(arr: np.ndarray, h: float, xs: np.ndarray) -> np.ndarray:
    """Evaluate (1/(n h)) * sum K((x - xi)/h) at arbitrary points."""
    z = (xs[:, None] - arr[None, :]) / h
    return np.exp(-0.5 * z * z).sum(axis=1) / (arr.size * h * math.sqrt(2 * math.pi))


def kde(values, bandwidth: float | None = None) -> DensityCurve:
    arr = _as_clean_array(values)
    h = silverman_bandwidth(arr) if bandwidth is None else float(bandwidth)
    if not (h > 0 and math.isfinite(h)):
        raise NonFiniteBandwidth(f"bandwidth must be a positive finite number, got {h}")
    xs = np.linspace(arr.min() - 3 * h, arr.max() + 3 * h, GRID_POINTS)
    ys = gaussian_kde_pdf(arr, h, xs)
    return DensityCurve(xs=xs, ys=ys, bandwidth=h, n=int(arr.size))


def class_distributions(column, labels, selection) -> dict:
    """Box + density per group: spambot, genuine, unlabeled and selected.

    `column` holds per-account values aligned with `labels`; `selection` is
    a boolean mask of the same length. Groups with no members are absent.
    """
    arr = np.asarray(column, dtype=float).ravel()
    labels = list(labels)
    mask = np.asarray(selection, dtype=bool).ravel()
    if not (len(labels) == arr.size == mask.size):
        raise LengthMismatch(
            f"column ({arr.size}), labels ({len(labels)}) and selection ({mask.size}) differ"
        )
    groups = {
        "spambot": np.array([lab == "spambot" for lab in labels]),
        "genuine": np.array([lab == "genuine" for lab in labels]),
        "unlabeled": np.array([lab == "unlabeled" for lab in labels]),
        "selected": mask,
    }
    out = {}
    for name, member in groups.items():
        if member.any():
            vals = arr[member]
            out[name] = (box_stats(vals), kde(vals))
    return out
