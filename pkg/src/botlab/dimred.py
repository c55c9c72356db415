"""Column transforms and the four 2-D embedding methods.

All methods are deterministic for a given (matrix, spec, labels): kernel
eigenvectors get a fixed sign (largest-magnitude component positive, ties
resolved toward the highest row index, which pins the analytic collinear
case to (-sqrt2, 0, sqrt2)), neighbor ties break on index, and t-SNE starts
from the PCA projection scaled by 1e-4 instead of a random draw.

t-SNE follows the reference exact-gradient algorithm with early
exaggeration 12 for the first 62 iterations and momentum switching
0.5 -> 0.8 at iteration 250.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import (
    Cancelled,
    DidNotConverge,
    InsufficientClasses,
    InvalidHyperparameter,
    NonFiniteInput,
    TooFewPoints,
)
from .features import FeatureMatrix

EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250 // 4
MOMENTUM_SWITCH_ITER = 250


@dataclass(frozen=True)
class TransformSpec:
    mode: str = "none"  # none | minmax | zscore

    def validate(self) -> None:
        if self.mode not in ("none", "minmax", "zscore"):
            raise InvalidHyperparameter("mode", f"unknown transform {self.mode!r}")


@dataclass(frozen=True)
class DRSpec:
    method: str = "kpca"      # kpca | lda_supervised | lle | tsne
    kernel: str = "rbf"       # kpca: linear | rbf | poly
    gamma: float = 1.0 / 50.0
    degree: int = 3
    k_neighbors: int = 10
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    seed: int = 0

    def validate(self) -> None:
        if self.method not in ("kpca", "lda_supervised", "lle", "tsne"):
            raise InvalidHyperparameter("method", f"unknown method {self.method!r}")
        if self.method == "kpca":
            if self.kernel not in ("linear", "rbf", "poly"):
                raise InvalidHyperparameter("kernel", f"unknown kernel {self.kernel!r}")
            if self.kernel == "rbf" and not self.gamma > 0:
                raise InvalidHyperparameter("gamma", "must be > 0")
            if self.kernel == "poly" and self.degree < 2:
                raise InvalidHyperparameter("degree", "must be >= 2")
        if self.method == "lle" and self.k_neighbors < 2:
            raise InvalidHyperparameter("k_neighbors", "must be >= 2")
        if self.method == "tsne":
            if not self.perplexity > 1:
                raise InvalidHyperparameter("perplexity", "must be > 1")
            if self.iterations < 250:
                raise InvalidHyperparameter("iterations", "must be >= 250")
            if not self.learning_rate > 0:
                raise InvalidHyperparameter("learning_rate", "must be > 0")

    def to_json(self) -> dict:
        out = {"method": self.method}
        if self.method == "kpca":
            out["kernel"] = self.kernel
            if self.kernel == "rbf":
                out["gamma"] = self.gamma
            if self.kernel == "poly":
                out["degree"] = self.degree
        elif self.method == "lle":
            out["k_neighbors"] = self.k_neighbors
        elif self.method == "tsne":
            out.update(perplexity=self.perplexity, iterations=self.iterations,
                       learning_rate=self.learning_rate, seed=self.seed)
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "DRSpec":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(doc) - known
        if bad:
            raise InvalidHyperparameter(sorted(bad)[0], "unknown field")
        spec = cls(**doc)
        spec.validate()
        return spec


@dataclass(frozen=True)
class Embedding2D:
    account_ids: tuple[str, ...]
    coords: np.ndarray  # n x 2
    spec: DRSpec


def transform_values(values: np.ndarray, mode: str) -> np.ndarray:
    """Per-column minmax/zscore with constant columns mapped to all zeros."""
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("matrix contains NaN or infinity")
    if mode == "none":
        return values.copy()
    out = np.zeros_like(values, dtype=float)
    if mode == "minmax":
        lo = values.min(axis=0)
        hi = values.max(axis=0)
        span = hi - lo
        nz = span > 0
        out[:, nz] = (values[:, nz] - lo[nz]) / span[nz]
        return out
    if mode == "zscore":
        mean = values.mean(axis=0)
        std = values.std(axis=0)  # population form
        nz = std > 0
        out[:, nz] = (values[:, nz] - mean[nz]) / std[nz]
        return out
    raise InvalidHyperparameter("mode", f"unknown transform {mode!r}")


def transform(matrix: FeatureMatrix, spec: TransformSpec) -> FeatureMatrix:
    spec.validate()
    return replace(matrix, values=transform_values(matrix.values, spec.mode))


def _fix_sign(col: np.ndarray) -> np.ndarray:
    """Flip so the largest-magnitude entry is positive (last one on ties)."""
    mags = np.abs(col)
    peak = mags.max()
    if peak == 0:
        return col
    idx = np.flatnonzero(mags >= peak * (1.0 - 1e-12))[-1]
    return -col if col[idx] < 0 else col


def _pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    sq = (x * x).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _kernel_matrix(x: np.ndarray, spec: DRSpec) -> np.ndarray:
    if spec.kernel == "linear":
        return x @ x.T
    if spec.kernel == "rbf":
        return np.exp(-spec.gamma * _pairwise_sq_dists(x))
    return (x @ x.T + 1.0) ** spec.degree


def _centered_kernel_eigs(k: np.ndarray, n_axes: int) -> np.ndarray:
    """Top-eigenpair projections sqrt(lam) * v of the centered kernel."""
    n = k.shape[0]
    ones = np.full((n, n), 1.0 / n)
    kc = k - ones @ k - k @ ones + ones @ k @ ones
    kc = (kc + kc.T) / 2.0
    lams, vecs = np.linalg.eigh(kc)
    tol = n * np.finfo(float).eps * max(float(np.abs(k).max()), 1e-300)
    coords = np.zeros((n, n_axes))
    for axis in range(n_axes):
        lam = lams[-1 - axis]
        if lam > tol:
            coords[:, axis] = _fix_sign(vecs[:, -1 - axis]) * np.sqrt(lam)
    return coords


def _pca_2d(x: np.ndarray) -> np.ndarray:
    return _centered_kernel_eigs(x @ x.T, 2)


def _reduce_kpca(x: np.ndarray, spec: DRSpec) -> np.ndarray:
    return _centered_kernel_eigs(_kernel_matrix(x, spec), 2)


def _reduce_lda(x: np.ndarray, labels) -> np.ndarray:
    classes: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        if lab is not None and lab != "unlabeled":
            classes.setdefault(lab, []).append(i)
    classes = {c: idx for c, idx in sorted(classes.items()) if len(idx) >= 2}
    if len(classes) < 2:
        raise InsufficientClasses("need >= 2 classes with >= 2 members each")

    d = x.shape[1]
    labeled = np.concatenate([idx for idx in classes.values()])
    mu = x[labeled].mean(axis=0)
    sw = np.zeros((d, d))
    sb = np.zeros((d, d))
    for idx in classes.values():
        pts = x[idx]
        mu_c = pts.mean(axis=0)
        centered = pts - mu_c
        sw += centered.T @ centered
        gap = (mu_c - mu)[:, None]
        sb += len(idx) * (gap @ gap.T)

    ridge = 1e-6 * (np.trace(sw) / d if np.trace(sw) > 0 else 1.0)
    sw_lams, sw_vecs = np.linalg.eigh((sw + sw.T) / 2.0 + ridge * np.eye(d))
    whiten = sw_vecs @ np.diag(1.0 / np.sqrt(sw_lams)) @ sw_vecs.T
    m = whiten @ sb @ whiten
    lams, vecs = np.linalg.eigh((m + m.T) / 2.0)

    n_disc = min(2, len(classes) - 1)
    centered_all = x - x.mean(axis=0)
    coords = np.zeros((x.shape[0], 2))
    dirs = []
    for axis in range(n_disc):
        w = whiten @ vecs[:, -1 - axis]
        norm = np.linalg.norm(w)
        if norm > 0:
            w = w / norm
        dirs.append(w)
        coords[:, axis] = _fix_sign(centered_all @ w)
    if n_disc == 1:
        # single Fisher axis: fill axis 2 with the residual's top PC
        residual = centered_all - np.outer(centered_all @ dirs[0], dirs[0])
        coords[:, 1] = _pca_2d(residual)[:, 0]
    return coords


def lle_reconstruction_weights(x: np.ndarray, k_neighbors: int) -> np.ndarray:
    """n x n row-stochastic weights reconstructing each point from its
    k nearest neighbors (local Gram regularized by 1e-3 of its trace)."""
    n = x.shape[0]
    k = k_neighbors
    if k >= n:
        raise InvalidHyperparameter("k_neighbors", f"must be < n ({n})")
    d2 = _pairwise_sq_dists(x)
    np.fill_diagonal(d2, np.inf)
    neighbors = np.argsort(d2, axis=1, kind="stable")[:, :k]

    weights = np.zeros((n, n))
    for i in range(n):
        z = x[neighbors[i]] - x[i]
        gram = z @ z.T
        trace = np.trace(gram)
        gram = gram + np.eye(k) * (1e-3 * trace if trace > 0 else 1e-3)
        w = np.linalg.solve(gram, np.ones(k))
        total = w.sum()
        w = w / total if total != 0 else np.full(k, 1.0 / k)
        weights[i, neighbors[i]] = w
    return weights


def _reduce_lle(x: np.ndarray, spec: DRSpec) -> np.ndarray:
    weights = lle_reconstruction_weights(x, spec.k_neighbors)
    n = x.shape[0]
    m = np.eye(n) - weights
    m = m.T @ m
    _, vecs = np.linalg.eigh((m + m.T) / 2.0)
    return np.column_stack([_fix_sign(vecs[:, 1]), _fix_sign(vecs[:, 2])])


def _reduce_tsne(x: np.ndarray, spec: DRSpec, cancel: threading.Event | None) -> np.ndarray:
    n = x.shape[0]
    if 3.0 * spec.perplexity >= n:
        raise InvalidHyperparameter("perplexity", f"need 3*perplexity < n ({n})")
    d2 = _pairwise_sq_dists(x)
    cond, _ = kernels.tsne_affinities(d2, spec.perplexity, 1e-10, 200)
    p = (cond + cond.T) / (2.0 * n)

    y = _pca_2d(x) * 1e-4
    vel = np.zeros_like(y)
    for it in range(spec.iterations):
        if cancel is not None and cancel.is_set():
            raise Cancelled("t-SNE cancelled")
        exag = EXAGGERATION if it < EXAGGERATION_ITERS else 1.0
        momentum = 0.5 if it < MOMENTUM_SWITCH_ITER else 0.8
        kernels.tsne_step(p, y, vel, spec.learning_rate, momentum, exag)
        if not np.all(np.isfinite(y)):
            raise DidNotConverge(f"non-finite coordinates at iteration {it}")
    return y


def reduce(
    matrix: FeatureMatrix | np.ndarray,
    spec: DRSpec,
    labels=None,
    cancel: threading.Event | None = None,
) -> Embedding2D:
    """Project accounts to 2-D with the configured method."""
    spec.validate()
    if isinstance(matrix, FeatureMatrix):
        x = matrix.values
        account_ids = matrix.account_ids
    else:
        x = np.asarray(matrix, dtype=float)
        account_ids = tuple(str(i) for i in range(x.shape[0]))
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("matrix contains NaN or infinity")
    if x.shape[0] < 3:
        raise TooFewPoints(f"need at least 3 points, got {x.shape[0]}")

    if spec.method == "kpca":
        coords = _reduce_kpca(x, spec)
    elif spec.method == "lda_supervised":
        if labels is None:
            raise InsufficientClasses("lda_supervised requires labels")
        coords = _reduce_lda(x, list(labels))
    elif spec.method == "lle":
        coords = _reduce_lle(x, spec)
    else:
        coords = _reduce_tsne(x, spec, cancel)
    return Embedding2D(account_ids=tuple(account_ids), coords=coords, spec=spec)
