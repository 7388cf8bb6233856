"""Side-by-side comparison of the two-step pipeline against simpler routes.

Three candidates share one standardization and one stage-2 configuration:
principal-direction compression, plain mean compression, and no compression
at all (each point keeps its full flattened fiber block).  Reported per
route: feature count into stage 2, the embedding with its trustworthiness,
and cluster-recovery purity when ground-truth labels are supplied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from triview.errors import InputValidationError
from triview.session import PipelineConfig
from triview.stage1 import MEAN, PCA1D, ModeCombo, combos_for_point_mode, compress
from triview.stage2 import (
    NEIGHBOR,
    Embedding,
    clamp_neighbors,
    embed_linear,
    embed_neighbor,
)
from triview.tensor import MODE_NAMES, Mode, Tensor3, standardize, unfold

FLAT_COLUMN_CAP = 2_000_000

PCA_ROUTE = "pca"
MEAN_ROUTE = "mean"
FLAT_ROUTE = "flat"


@dataclass(frozen=True)
class BaselineEntry:
    """One route's outcome."""

    route: str
    n_features: int
    embedding: Embedding
    purity: float | None = None

    def to_doc(self) -> dict:
        return {
            "route": self.route,
            "n_features": self.n_features,
            "embedding": self.embedding.to_doc(),
            "purity": self.purity,
        }


@dataclass(frozen=True)
class BaselineReport:
    point_mode: Mode
    combo: ModeCombo
    entries: tuple[BaselineEntry, ...]

    def entry(self, route: str) -> BaselineEntry:
        for e in self.entries:
            if e.route == route:
                return e
        raise KeyError(route)

    def to_doc(self) -> dict:
        return {
            "point_mode": MODE_NAMES[self.point_mode],
            "combo": self.combo.to_doc(),
            "entries": [e.to_doc() for e in self.entries],
        }


def kmeans(
    X: np.ndarray, k: int, seed: int = 0, n_init: int = 10, max_iter: int = 300
) -> np.ndarray:
    """Plain Lloyd k-means with plus-plus seeding and restarts.

    Deterministic for a given seed; returns the best-inertia assignment.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise InputValidationError(f"k must be in [1, {n}], got {k}")
    best_labels = None
    best_inertia = np.inf
    for restart in range(n_init):
        rng = np.random.default_rng([seed, restart])
        centers = _plus_plus_init(X, k, rng)
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = np.argmin(d2, axis=1)
            for c in range(k):
                members = new_labels == c
                if members.any():
                    centers[c] = X[members].mean(axis=0)
                else:
                    # Re-seed an emptied cluster to the point farthest from
                    # its center.
                    centers[c] = X[np.argmax(d2.min(axis=1))]
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
        inertia = float(
            ((X - centers[labels]) ** 2).sum()
        )
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels.copy()
    return best_labels


def _plus_plus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            centers[c:] = centers[0]
            break
        centers[c] = X[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def purity(assignments: Sequence[int], truth: Sequence) -> float:
    """Fraction of points whose cluster's majority label matches theirs."""
    assignments = np.asarray(assignments)
    truth = np.asarray(truth)
    if assignments.shape != truth.shape:
        raise InputValidationError("assignment and label lengths differ")
    correct = 0
    for c in np.unique(assignments):
        members = truth[assignments == c]
        _, counts = np.unique(members, return_counts=True)
        correct += int(counts.max())
    return correct / assignments.size


def cluster_purity(Z: np.ndarray, truth: Sequence, seed: int = 0) -> float:
    """k-means recovery purity with k = number of distinct true labels."""
    truth = np.asarray(truth)
    k = len(np.unique(truth))
    return purity(kmeans(np.asarray(Z, dtype=np.float64), k, seed=seed), truth)


def flat_feature_count(t: Tensor3, point_mode: Mode) -> int:
    """Columns the no-compression route feeds to stage 2."""
    others = [m for m in Mode if m is not point_mode]
    return t.mode_length(others[0]) * t.mode_length(others[1])


def _embed_rows(Y: np.ndarray, config: PipelineConfig, combo: ModeCombo | None):
    if config.method2 == NEIGHBOR:
        params = clamp_neighbors(config.neighbor, Y.shape[0])
        return embed_neighbor(Y, params, combo=combo)
    return embed_linear(Y, combo=combo)


def compare_baselines(
    t: Tensor3,
    point_mode: Mode,
    config: PipelineConfig | None = None,
    labels: Sequence | None = None,
    combo: ModeCombo | None = None,
    column_cap: int = FLAT_COLUMN_CAP,
    seed: int = 0,
) -> BaselineReport:
    """Run the three routes for one point mode under identical settings.

    ``labels``, when given, must assign one ground-truth class per plotted
    point; purity is then reported for each route.
    """
    config = config or PipelineConfig()
    if combo is None:
        combo = combos_for_point_mode(point_mode)[0]
    elif combo.point_mode is not point_mode:
        raise InputValidationError("combo does not plot the requested point mode")
    n_points = t.mode_length(point_mode)
    if labels is not None and len(labels) != n_points:
        raise InputValidationError(
            f"expected {n_points} labels for {MODE_NAMES[point_mode]} points, "
            f"got {len(labels)}"
        )
    flat_columns = flat_feature_count(t, point_mode)
    if flat_columns > column_cap:
        raise InputValidationError(
            f"flat unfolding needs {flat_columns} columns, "
            f"above the cap of {column_cap}"
        )
    work = standardize(t, combo.first) if config.standardize else t

    entries = []
    for route, method1 in ((PCA_ROUTE, PCA1D), (MEAN_ROUTE, MEAN)):
        compressed = compress(work, combo, method1)
        embedding = _embed_rows(compressed.Y, config, combo)
        entries.append(
            _entry(route, compressed.Y.shape[1], embedding, labels, seed)
        )

    flat = np.ascontiguousarray(unfold(work, point_mode).matrix.T)
    flat_embedding = _embed_rows(flat, config, None)
    entries.append(_entry(FLAT_ROUTE, flat.shape[1], flat_embedding, labels, seed))
    return BaselineReport(
        point_mode=point_mode, combo=combo, entries=tuple(entries)
    )


def _entry(route, n_features, embedding, labels, seed) -> BaselineEntry:
    score = None
    if labels is not None:
        score = cluster_purity(embedding.Z, labels, seed=seed)
    return BaselineEntry(
        route=route, n_features=n_features, embedding=embedding, purity=score
    )
