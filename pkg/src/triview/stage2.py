"""Second reduction step: project the rows of Y to 2-D.

Two methods behind one interface: ``linear`` (principal components via SVD)
and ``neighbor`` (a UMAP-style stochastic neighbor embedding built on an
exact k-NN graph).  Both produce an :class:`Embedding` that records the
method, its parameters and a trustworthiness score so results stay
comparable and replayable.
"""

from __future__ import annotations

import base64
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from triview._layout import BACKEND, optimize_layout
from triview.errors import InputValidationError, JobCancelled
from triview.stage1 import ModeCombo, apply_sign_convention

LINEAR = "linear"
NEIGHBOR = "neighbor"
STAGE2_METHODS = (LINEAR, NEIGHBOR)

DEFAULT_N_NEIGHBORS = 15
DEFAULT_MIN_DIST = 0.1
DEFAULT_EPOCHS = 500

# Rows above this serialize Z as base64-packed doubles instead of a JSON
# number list, to bound payload size.
Z_INLINE_LIMIT = 10_000

_SMOOTH_K_TOLERANCE = 1e-5
_MIN_K_DIST_SCALE = 1e-3
_SIGMA_ITERATIONS = 64
_NEGATIVE_SAMPLE_RATE = 5
_REPULSION_GAMMA = 1.0
_INITIAL_ALPHA = 1.0
_INIT_SCALE = 10.0
_TRUST_K = 10


@dataclass(frozen=True)
class NeighborParams:
    """Knobs of the neighbor embedding, recorded verbatim in the result."""

    n_neighbors: int = DEFAULT_N_NEIGHBORS
    min_dist: float = DEFAULT_MIN_DIST
    epochs: int = DEFAULT_EPOCHS
    seed: int = 0

    def __post_init__(self):
        if self.n_neighbors < 2:
            raise InputValidationError("n_neighbors must be at least 2")
        if not self.min_dist > 0:
            raise InputValidationError("min_dist must be positive")
        if self.epochs < 1:
            raise InputValidationError("epochs must be at least 1")
        if self.seed < 0:
            raise InputValidationError("seed must be non-negative")

    def to_doc(self) -> dict:
        return {
            "n_neighbors": self.n_neighbors,
            "min_dist": self.min_dist,
            "epochs": self.epochs,
            "seed": self.seed,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "NeighborParams":
        return cls(
            n_neighbors=int(doc["n_neighbors"]),
            min_dist=float(doc["min_dist"]),
            epochs=int(doc["epochs"]),
            seed=int(doc["seed"]),
        )


@dataclass(frozen=True)
class Embedding:
    """2-D coordinates for Y's rows plus the provenance needed to replay."""

    Z: np.ndarray
    method: str
    combo: ModeCombo | None = None
    params: dict = field(default_factory=dict)
    seed: int | None = None
    trustworthiness: float | None = None
    trustworthiness_k: int | None = None
    warning: str | None = None

    def __post_init__(self):
        z = np.asarray(self.Z, dtype=np.float64)
        if z.ndim != 2 or z.shape[1] != 2:
            raise InputValidationError("Z must be a rows-by-2 array")
        if not np.isfinite(z).all():
            raise InputValidationError("Z contains non-finite coordinates")
        z.flags.writeable = False
        object.__setattr__(self, "Z", z)

    @property
    def n_points(self) -> int:
        return self.Z.shape[0]

    def to_doc(self) -> dict:
        n = self.Z.shape[0]
        if n > Z_INLINE_LIMIT:
            z_doc = {
                "encoding": "base64",
                "dtype": "<f8",
                "shape": [n, 2],
                "data": base64.b64encode(
                    np.ascontiguousarray(self.Z).tobytes()
                ).decode("ascii"),
            }
        else:
            z_doc = [[float(x), float(y)] for x, y in self.Z]
        return {
            "z": z_doc,
            "method": self.method,
            "combo": self.combo.to_doc() if self.combo is not None else None,
            "params": dict(self.params),
            "seed": self.seed,
            "trustworthiness": self.trustworthiness,
            "trustworthiness_k": self.trustworthiness_k,
            "warning": self.warning,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Embedding":
        z_doc = doc["z"]
        if isinstance(z_doc, dict):
            raw = base64.b64decode(z_doc["data"])
            z = np.frombuffer(raw, dtype=z_doc["dtype"]).reshape(z_doc["shape"])
            z = z.astype(np.float64)
        else:
            z = np.asarray(z_doc, dtype=np.float64)
        combo_doc = doc.get("combo")
        trust = doc.get("trustworthiness")
        trust_k = doc.get("trustworthiness_k")
        return cls(
            Z=z,
            method=doc["method"],
            combo=ModeCombo.from_doc(combo_doc) if combo_doc else None,
            params=dict(doc.get("params") or {}),
            seed=doc.get("seed"),
            trustworthiness=None if trust is None else float(trust),
            trustworthiness_k=None if trust_k is None else int(trust_k),
            warning=doc.get("warning"),
        )


def _as_row_matrix(Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise InputValidationError("Y must be a 2-D matrix")
    if not np.isfinite(Y).all():
        raise InputValidationError("Y contains non-finite values")
    return Y


def pairwise_distances(Y: np.ndarray) -> np.ndarray:
    """Dense Euclidean distance matrix over Y's rows."""
    sq = np.einsum("ij,ij->i", Y, Y)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def exact_knn(Y: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Brute-force k nearest neighbors per row, self excluded.

    Ties break on the lower row index (stable sort) so the graph is
    reproducible.  Returns (indices, distances), each rows x k.
    """
    n = Y.shape[0]
    if k < 1 or k >= n:
        raise InputValidationError(f"k must be in [1, {n - 1}], got {k}")
    dist = pairwise_distances(Y)
    order = np.argsort(dist, axis=1, kind="stable")
    idx = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        row = order[i]
        idx[i] = row[row != i][:k]
    return idx, np.take_along_axis(dist, idx, axis=1)


def smooth_knn(knn_dists: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row kernel calibration for the fuzzy neighborhood graph.

    rho is the distance to the nearest distinct neighbor; sigma is found by
    binary search so the smoothed neighbor count hits log2(k).
    """
    n, k = knn_dists.shape
    target = math.log2(k)
    rhos = np.zeros(n)
    sigmas = np.zeros(n)
    mean_all = float(knn_dists.mean()) if knn_dists.size else 0.0
    for i in range(n):
        row = knn_dists[i]
        nonzero = row[row > 0.0]
        if nonzero.size:
            rhos[i] = nonzero[0]
        lo, hi, mid = 0.0, math.inf, 1.0
        for _ in range(_SIGMA_ITERATIONS):
            shifted = np.maximum(row - rhos[i], 0.0)
            psum = float(np.sum(np.exp(-shifted / mid)))
            if abs(psum - target) < _SMOOTH_K_TOLERANCE:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == math.inf else (lo + hi) / 2.0
        sigmas[i] = mid
        floor = _MIN_K_DIST_SCALE * (float(row.mean()) if rhos[i] > 0.0 else mean_all)
        if sigmas[i] < floor:
            sigmas[i] = floor
    return sigmas, rhos


def neighbor_graph(Y: np.ndarray, n_neighbors: int) -> np.ndarray:
    """Symmetrized fuzzy k-NN graph as a dense weight matrix."""
    idx, dists = exact_knn(Y, n_neighbors)
    sigmas, rhos = smooth_knn(dists)
    n = Y.shape[0]
    w = np.zeros((n, n))
    for i in range(n):
        for j_pos in range(n_neighbors):
            j = idx[i, j_pos]
            d = dists[i, j_pos] - rhos[i]
            w[i, j] = 1.0 if d <= 0.0 else math.exp(-d / sigmas[i])
    # Fuzzy union: P(i~j or j~i) under independence.
    return w + w.T - w * w.T


def _edge_schedule(
    weights: np.ndarray, n_epochs: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """COO edge list plus per-edge sampling period, row-major order."""
    w_max = float(weights.max())
    if w_max <= 0.0:
        raise InputValidationError("neighbor graph has no edges")
    keep = weights >= w_max / n_epochs
    np.fill_diagonal(keep, False)
    head, tail = np.nonzero(keep)
    eps = w_max / weights[head, tail]
    return head.astype(np.int64), tail.astype(np.int64), eps


def fit_curve_params(min_dist: float, spread: float = 1.0) -> tuple[float, float]:
    """Fit (a, b) of the low-dimensional kernel 1/(1 + a d^(2b)).

    Least-squares match to an exponential fall-off that stays flat inside
    min_dist, the same shaping used by UMAP.
    """
    xs = np.linspace(0.0, spread * 3.0, 300)
    ys = np.where(xs < min_dist, 1.0, np.exp(-(xs - min_dist) / spread))
    (a, b), _ = curve_fit(lambda x, a, b: 1.0 / (1.0 + a * x ** (2.0 * b)), xs, ys)
    return float(a), float(b)


def _pca_coordinates(Y: np.ndarray) -> tuple[np.ndarray, str | None]:
    """Top-2 principal coordinates with the stage-1 sign convention."""
    n = Y.shape[0]
    centered = Y - Y.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    cutoff = s[0] * 1e-12 if s.size else 0.0
    z = np.zeros((n, 2))
    rank = 0
    for comp in range(min(2, s.size)):
        if s[comp] > cutoff:
            z[:, comp] = centered @ apply_sign_convention(vt[comp])
            rank = comp + 1
    if rank == 0:
        return z, "input has zero variance: all points coincide"
    if rank == 1:
        return z, "input has rank 1: second axis set to zero"
    return z, None


def trustworthiness(Y: np.ndarray, Z: np.ndarray, k: int) -> float:
    """How much Z's k-neighborhoods can be trusted to reflect Y's.

    1 is perfect; each point appearing among Z's k nearest neighbors but not
    among Y's is penalized by how far down Y's ranking it sits.
    """
    Y = _as_row_matrix(Y)
    Z = _as_row_matrix(Z)
    n = Y.shape[0]
    if Z.shape[0] != n:
        raise InputValidationError("Y and Z row counts differ")
    if k < 1 or 2 * k >= n:
        raise InputValidationError(f"k must satisfy 1 <= k < rows/2, got {k}")
    order_y = np.argsort(pairwise_distances(Y), axis=1, kind="stable")
    order_z = np.argsort(pairwise_distances(Z), axis=1, kind="stable")
    # rank_y[i, j]: position of j among i's original-space neighbors (1-based,
    # self excluded).
    rank_y = np.empty((n, n), dtype=np.int64)
    penalty = 0
    for i in range(n):
        others = order_y[i][order_y[i] != i]
        rank_y[i, others] = np.arange(1, n)
        z_neighbors = order_z[i][order_z[i] != i][:k]
        ranks = rank_y[i, z_neighbors]
        penalty += int(np.sum(ranks[ranks > k] - k))
    norm = 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0))
    return 1.0 - norm * penalty


def _trust_or_none(Y: np.ndarray, Z: np.ndarray) -> tuple[float | None, int | None]:
    # Default k is 10; shrink on small inputs where the metric is undefined.
    k = min(_TRUST_K, (Y.shape[0] - 1) // 2)
    if k < 1:
        return None, None
    return trustworthiness(Y, Z, k), k


def embed_linear(Y: np.ndarray, combo: ModeCombo | None = None) -> Embedding:
    """Project rows onto their top-2 principal components."""
    Y = _as_row_matrix(Y)
    if Y.shape[0] < 2:
        raise InputValidationError("linear embedding needs at least 2 rows")
    z, warning = _pca_coordinates(Y)
    trust, trust_k = _trust_or_none(Y, z)
    return Embedding(
        Z=z,
        method=LINEAR,
        combo=combo,
        trustworthiness=trust,
        trustworthiness_k=trust_k,
        warning=warning,
    )


def embed_neighbor(
    Y: np.ndarray,
    params: NeighborParams | None = None,
    combo: ModeCombo | None = None,
    progress=None,
) -> Embedding:
    """Neighbor embedding of Y's rows, bit-deterministic for a given seed.

    ``progress`` is polled with the completed fraction during optimization;
    returning False cancels the job (raises JobCancelled).
    """
    Y = _as_row_matrix(Y)
    params = params or NeighborParams()
    n = Y.shape[0]
    if n < params.n_neighbors + 1:
        raise InputValidationError(
            f"neighbor embedding needs at least {params.n_neighbors + 1} rows "
            f"for {params.n_neighbors} neighbors, got {n}"
        )
    weights = neighbor_graph(Y, params.n_neighbors)
    head, tail, eps = _edge_schedule(weights, params.epochs)
    a, b = fit_curve_params(params.min_dist)
    z, _ = _pca_coordinates(Y)
    peak = float(np.max(np.abs(z)))
    if peak > 0.0:
        z *= _INIT_SCALE / peak
    z = np.ascontiguousarray(z)
    completed = optimize_layout(
        z,
        head,
        tail,
        eps,
        a,
        b,
        _REPULSION_GAMMA,
        _INITIAL_ALPHA,
        params.epochs,
        _NEGATIVE_SAMPLE_RATE,
        params.seed,
        progress=progress,
    )
    if completed < params.epochs:
        raise JobCancelled(
            f"layout cancelled after {completed}/{params.epochs} epochs"
        )
    trust, trust_k = _trust_or_none(Y, z)
    return Embedding(
        Z=z,
        method=NEIGHBOR,
        combo=combo,
        params=params.to_doc(),
        seed=params.seed,
        trustworthiness=trust,
        trustworthiness_k=trust_k,
    )


def embed(
    Y: np.ndarray,
    method: str,
    params: NeighborParams | None = None,
    combo: ModeCombo | None = None,
    progress=None,
) -> Embedding:
    """Dispatch to one of the stage-2 methods by name."""
    if method == LINEAR:
        return embed_linear(Y, combo=combo)
    if method == NEIGHBOR:
        return embed_neighbor(Y, params=params, combo=combo, progress=progress)
    raise InputValidationError(
        f"unknown stage-2 method {method!r}; available: {', '.join(STAGE2_METHODS)}"
    )


def clamp_neighbors(params: NeighborParams, rows: int) -> NeighborParams:
    """Shrink n_neighbors to fit small inputs, keeping everything else."""
    limit = max(2, rows - 1)
    if params.n_neighbors <= limit:
        return params
    return replace(params, n_neighbors=limit)
