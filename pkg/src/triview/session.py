"""Workflow orchestration: pipelines per mode combination, cluster
selections, explanations and histogram payloads.

A Session owns one tensor, caches pipeline results per (combo, config),
hands out cluster ids and colors, and keeps every cluster's feature
contributions current as the selection set changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from triview.contrast import (
    PALETTE_SIZE,
    ClusterSelection,
    FeatureContributions,
    explain_cluster,
)
from triview.errors import InputValidationError
from triview.stage1 import (
    PCA1D,
    STAGE1_METHODS,
    CompressedMatrix,
    ModeCombo,
    combos_for_point_mode,
    compress,
)
from triview.stage2 import (
    NEIGHBOR,
    STAGE2_METHODS,
    Embedding,
    NeighborParams,
    clamp_neighbors,
    embed_linear,
    embed_neighbor,
)
from triview.tensor import MODE_NAMES, Mode, Tensor3, standardize

DEFAULT_BINS = 20

ProgressFn = Callable[[float], object]


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that determines a pipeline run besides the tensor."""

    method1: str = PCA1D
    method2: str = NEIGHBOR
    neighbor: NeighborParams = NeighborParams()
    standardize: bool = True
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        if self.method1 not in STAGE1_METHODS:
            raise InputValidationError(
                f"unknown stage-1 method {self.method1!r}; "
                f"available: {', '.join(STAGE1_METHODS)}"
            )
        if self.method2 not in STAGE2_METHODS:
            raise InputValidationError(
                f"unknown stage-2 method {self.method2!r}; "
                f"available: {', '.join(STAGE2_METHODS)}"
            )
        if self.bins < 1:
            raise InputValidationError("bins must be at least 1")

    def key(self) -> tuple:
        return (
            self.method1,
            self.method2,
            tuple(sorted(self.neighbor.to_doc().items())),
            self.standardize,
        )

    def to_doc(self) -> dict:
        return {
            "method1": self.method1,
            "method2": self.method2,
            "neighbor": self.neighbor.to_doc(),
            "standardize": self.standardize,
            "bins": self.bins,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PipelineConfig":
        return cls(
            method1=doc.get("method1", PCA1D),
            method2=doc.get("method2", NEIGHBOR),
            neighbor=NeighborParams.from_doc(doc["neighbor"])
            if doc.get("neighbor")
            else NeighborParams(),
            standardize=bool(doc.get("standardize", True)),
            bins=int(doc.get("bins", DEFAULT_BINS)),
        )


@dataclass(frozen=True)
class AnalysisResult:
    """One pipeline run: the compressed matrix and its 2-D embedding."""

    combo: ModeCombo
    compressed: CompressedMatrix
    embedding: Embedding
    point_mode: Mode

    def __post_init__(self):
        if self.point_mode is not self.combo.point_mode:
            raise InputValidationError("point_mode must be the combo's free mode")
        if self.embedding.Z.shape[0] != self.compressed.Y.shape[0]:
            raise InputValidationError(
                "embedding and compressed matrix disagree on row count"
            )

    @property
    def n_points(self) -> int:
        return self.compressed.Y.shape[0]

    def to_doc(self) -> dict:
        return {
            "combo": self.combo.to_doc(),
            "compressed": self.compressed.to_doc(),
            "embedding": self.embedding.to_doc(),
            "point_mode": MODE_NAMES[self.point_mode],
        }


@dataclass(frozen=True)
class HistogramSet:
    """Relative-frequency histograms over one Y column, shared bin edges."""

    feature_index: int
    bin_edges: np.ndarray
    cluster_frequencies: dict  # cluster_id -> frequency vector
    remainder_frequencies: np.ndarray | None
    y_max: float

    def to_doc(self) -> dict:
        return {
            "feature_index": self.feature_index,
            "bin_edges": [float(e) for e in self.bin_edges],
            "clusters": [
                {"cluster_id": cid, "frequencies": [float(f) for f in freqs]}
                for cid, freqs in sorted(self.cluster_frequencies.items())
            ],
            "remainder": None
            if self.remainder_frequencies is None
            else [float(f) for f in self.remainder_frequencies],
            "y_max": self.y_max,
        }


def run_pipeline(
    t: Tensor3,
    combo: ModeCombo,
    config: PipelineConfig | None = None,
    progress: ProgressFn | None = None,
) -> AnalysisResult:
    """Standardize, compress along combo.first, embed the rows of Y."""
    config = config or PipelineConfig()
    work = standardize(t, combo.first) if config.standardize else t
    compressed = compress(work, combo, config.method1)
    if config.method2 == NEIGHBOR:
        # Small plot modes get a reduced neighbor count; the params recorded
        # in the embedding are the clamped ones actually used.
        params = clamp_neighbors(config.neighbor, compressed.Y.shape[0])
        embedding = embed_neighbor(
            compressed.Y, params, combo=combo, progress=progress
        )
    else:
        embedding = embed_linear(compressed.Y, combo=combo)
    return AnalysisResult(
        combo=combo,
        compressed=compressed,
        embedding=embedding,
        point_mode=combo.point_mode,
    )


def results_for_point_mode(
    t: Tensor3,
    point_mode: Mode,
    config: PipelineConfig | None = None,
    progress: ProgressFn | None = None,
) -> list[AnalysisResult]:
    """Run both combos that plot the given mode, in canonical order."""
    combos = combos_for_point_mode(point_mode)
    results = []
    for i, combo in enumerate(combos):
        sub = None
        if progress is not None:
            sub = lambda frac, base=i: progress((base + frac) / len(combos))
        results.append(run_pipeline(t, combo, config, progress=sub))
    return results


def compute_histograms(
    Y: np.ndarray,
    clusters: Iterable[ClusterSelection],
    feature_index: int,
    bins: int = DEFAULT_BINS,
) -> HistogramSet:
    """Per-cluster and remainder relative-frequency histograms of a column.

    Bin edges are shared by all groups and span the column's full range; a
    single-valued column gets one bin widened by +-0.5 around the value.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise InputValidationError("Y must be a 2-D matrix")
    n_rows, n_cols = Y.shape
    if not 0 <= feature_index < n_cols:
        raise InputValidationError(
            f"feature index {feature_index} out of range [0, {n_cols - 1}]"
        )
    if bins < 1:
        raise InputValidationError("bins must be at least 1")
    clusters = list(clusters)
    seen: set[int] = set()
    for sel in clusters:
        members = set(sel.member_rows)
        if members & seen:
            raise InputValidationError("clusters must be pairwise disjoint")
        if members and max(members) >= n_rows:
            raise InputValidationError(
                f"cluster {sel.cluster_id} references rows beyond Y"
            )
        seen |= members

    column = Y[:, feature_index]
    lo = float(column.min())
    hi = float(column.max())
    if lo == hi:
        edges = np.array([lo - 0.5, hi + 0.5])
    else:
        edges = np.linspace(lo, hi, bins + 1)

    def relative(rows: np.ndarray) -> np.ndarray:
        counts, _ = np.histogram(column[rows], bins=edges)
        return counts / rows.size

    cluster_freqs = {}
    for sel in clusters:
        rows = np.fromiter(sorted(sel.member_rows), dtype=np.int64)
        cluster_freqs[sel.cluster_id] = relative(rows)
    remainder_rows = np.array(sorted(set(range(n_rows)) - seen), dtype=np.int64)
    remainder = relative(remainder_rows) if remainder_rows.size else None

    y_max = 0.0
    for freqs in cluster_freqs.values():
        y_max = max(y_max, float(freqs.max()))
    if remainder is not None:
        y_max = max(y_max, float(remainder.max()))
    return HistogramSet(
        feature_index=feature_index,
        bin_edges=edges,
        cluster_frequencies=cluster_freqs,
        remainder_frequencies=remainder,
        y_max=y_max,
    )


def color_for_cluster(cluster_id: int) -> int:
    """Categorical palette slot; a pure function of the id."""
    return (cluster_id - 1) % PALETTE_SIZE


@dataclass
class Session:
    """One analysis context: a tensor, a point mode, selections, caches."""

    tensor: Tensor3
    config: PipelineConfig = field(default_factory=PipelineConfig)
    point_mode: Mode = Mode.INSTANCE

    def __post_init__(self):
        self.clusters: list[ClusterSelection] = []
        self.contributions: dict[int, dict[str, FeatureContributions]] = {}
        self._next_cluster_id = 1
        self._result_cache: dict[tuple, AnalysisResult] = {}

    @property
    def n_points(self) -> int:
        return self.tensor.mode_length(self.point_mode)

    def set_point_mode(self, point_mode: Mode) -> None:
        """Switch the plotted mode; selections index another mode, so they
        are discarded."""
        if point_mode is self.point_mode:
            return
        self.point_mode = point_mode
        self.clusters = []
        self.contributions = {}

    def set_config(self, config: PipelineConfig) -> None:
        self.config = config
        self.contributions = {}
        if self.clusters:
            self._recompute_contributions()

    def active_combos(self) -> list[ModeCombo]:
        return combos_for_point_mode(self.point_mode)

    def results(self, progress: ProgressFn | None = None) -> list[AnalysisResult]:
        """Both pipeline results for the current point mode, cached."""
        combos = self.active_combos()
        missing = [
            c for c in combos if (c.key(), self.config.key()) not in self._result_cache
        ]
        for i, combo in enumerate(missing):
            sub = None
            if progress is not None:
                sub = lambda frac, base=i: progress((base + frac) / len(missing))
            self._result_cache[(combo.key(), self.config.key())] = run_pipeline(
                self.tensor, combo, self.config, progress=sub
            )
        return [self._result_cache[(c.key(), self.config.key())] for c in combos]

    def result_for(self, combo: ModeCombo) -> AnalysisResult:
        if combo.point_mode is not self.point_mode:
            raise InputValidationError(
                f"combo {combo.key()} does not plot the current point mode"
            )
        cache_key = (combo.key(), self.config.key())
        if cache_key not in self._result_cache:
            self._result_cache[cache_key] = run_pipeline(
                self.tensor, combo, self.config
            )
        return self._result_cache[cache_key]

    def select_cluster(
        self, point_ids: Iterable[int], label: str = ""
    ) -> ClusterSelection:
        """Add a cluster from lasso-picked point ids; ids get the next color
        slot and contributions are refreshed for every cluster."""
        ids = {int(p) for p in point_ids}
        if len(ids) < 2:
            raise InputValidationError("a cluster needs a minimum of 2 points")
        n = self.n_points
        bad = [p for p in ids if p < 0 or p >= n]
        if bad:
            raise InputValidationError(
                f"point id {bad[0]} out of range [0, {n - 1}]"
            )
        taken = set().union(*(c.member_rows for c in self.clusters)) if self.clusters else set()
        overlap = ids & taken
        if overlap:
            raise InputValidationError(
                f"points already in another cluster: {sorted(overlap)[:5]}"
            )
        if n - len(ids) - len(taken) < 2:
            raise InputValidationError(
                "selection leaves fewer than 2 unselected points"
            )
        cluster_id = self._next_cluster_id
        selection = ClusterSelection(
            cluster_id=cluster_id,
            member_rows=frozenset(ids),
            color_index=color_for_cluster(cluster_id),
            label=label or f"Cluster {cluster_id}",
        )
        self._next_cluster_id += 1
        self.clusters.append(selection)
        self._recompute_contributions()
        return selection

    def remove_cluster(self, cluster_id: int) -> None:
        """Drop a cluster; the rest keep their ids and colors."""
        kept = [c for c in self.clusters if c.cluster_id != cluster_id]
        if len(kept) == len(self.clusters):
            raise InputValidationError(f"no cluster with id {cluster_id}")
        self.clusters = kept
        self._recompute_contributions()

    def _recompute_contributions(self) -> None:
        # The background of each cluster is every other row, so any change
        # to the selection set refreshes all vectors.
        self.contributions = {}
        if not self.clusters:
            return
        for result in self.results():
            key = result.combo.key()
            for sel in self.clusters:
                fc = explain_cluster(result.compressed.Y, sel)
                self.contributions.setdefault(sel.cluster_id, {})[key] = fc

    def histograms(
        self,
        feature_index: int,
        combo: ModeCombo | None = None,
        bins: int | None = None,
    ) -> HistogramSet:
        combo = combo or self.active_combos()[0]
        result = self.result_for(combo)
        return compute_histograms(
            result.compressed.Y,
            self.clusters,
            feature_index,
            bins=bins or self.config.bins,
        )

    def to_doc(self) -> dict:
        """Replay document: everything needed to rebuild this session
        deterministically against the same dataset."""
        return {
            "dataset": self.tensor.name,
            "point_mode": MODE_NAMES[self.point_mode],
            "config": self.config.to_doc(),
            "clusters": [c.to_doc() for c in self.clusters],
            "next_cluster_id": self._next_cluster_id,
        }

    @classmethod
    def from_doc(cls, doc: dict, tensor: Tensor3) -> "Session":
        if doc.get("dataset") != tensor.name:
            raise InputValidationError(
                f"session references dataset {doc.get('dataset')!r}, "
                f"got {tensor.name!r}"
            )
        session = cls(
            tensor=tensor,
            config=PipelineConfig.from_doc(doc.get("config") or {}),
            point_mode=Mode.from_name(doc.get("point_mode", "instance")),
        )
        for cluster_doc in doc.get("clusters", ()):
            selection = ClusterSelection.from_doc(cluster_doc)
            session.clusters.append(selection)
        session._next_cluster_id = int(
            doc.get("next_cluster_id", len(session.clusters) + 1)
        )
        if session.clusters:
            session._recompute_contributions()
        return session
