"""Contrastive explanation of a selected cluster.

Given the compressed matrix Y and a row selection, finds the direction over
Y's columns along which the cluster most stands out from the remaining rows
(a contrastive-PCA variant), orients its signs so positive means "the
cluster sits higher", and scales it to [-1, 1] for charting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from triview.errors import InputValidationError
from triview.stage1 import apply_sign_convention

# Contrast strengths tried during the automatic search: no contrast at all,
# then a geometric sweep from very weak to very strong background removal.
ALPHA_GRID = (0.0,) + tuple(float(a) for a in np.logspace(-3.0, 3.0, 15))

# Below this best-achievable separation the cluster is treated as
# indistinguishable from the background.
_DISCREPANCY_FLOOR = 1e-9

PALETTE_SIZE = 10


@dataclass(frozen=True)
class ClusterSelection:
    """A user-picked set of rows, with stable id and color slot."""

    cluster_id: int
    member_rows: frozenset[int]
    color_index: int
    label: str = ""

    def __post_init__(self):
        if self.cluster_id < 1:
            raise InputValidationError("cluster_id must be a positive integer")
        if not self.member_rows:
            raise InputValidationError("cluster has no member rows")
        if any(r < 0 for r in self.member_rows):
            raise InputValidationError("member row indices must be non-negative")
        if not 0 <= self.color_index < PALETTE_SIZE:
            raise InputValidationError(
                f"color_index must be in [0, {PALETTE_SIZE - 1}]"
            )
        object.__setattr__(self, "member_rows", frozenset(int(r) for r in self.member_rows))

    def membership_vector(self, n_rows: int) -> np.ndarray:
        """0/1 vector over rows; 1 marks cluster members."""
        if max(self.member_rows) >= n_rows:
            raise InputValidationError(
                f"cluster {self.cluster_id} references row "
                f"{max(self.member_rows)} but Y has {n_rows} rows"
            )
        v = np.zeros(n_rows)
        v[sorted(self.member_rows)] = 1.0
        return v

    def to_doc(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "member_rows": sorted(self.member_rows),
            "color_index": self.color_index,
            "label": self.label,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ClusterSelection":
        return cls(
            cluster_id=int(doc["cluster_id"]),
            member_rows=frozenset(int(r) for r in doc["member_rows"]),
            color_index=int(doc["color_index"]),
            label=str(doc.get("label", "")),
        )


@dataclass(frozen=True)
class FeatureContributions:
    """Scaled per-column contribution vector for one cluster."""

    a: np.ndarray
    cluster_id: int
    alpha: float
    flipped: bool
    warning: str | None = None

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=np.float64)
        if arr.ndim != 1:
            raise InputValidationError("contribution vector must be 1-D")
        arr.flags.writeable = False
        object.__setattr__(self, "a", arr)

    def to_doc(self) -> dict:
        return {
            "a": [float(x) for x in self.a],
            "cluster_id": self.cluster_id,
            "alpha": self.alpha,
            "flipped": self.flipped,
            "warning": self.warning,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FeatureContributions":
        return cls(
            a=np.asarray(doc["a"], dtype=np.float64),
            cluster_id=int(doc["cluster_id"]),
            alpha=float(doc["alpha"]),
            flipped=bool(doc["flipped"]),
            warning=doc.get("warning"),
        )


def _population_cov(M: np.ndarray) -> np.ndarray:
    centered = M - M.mean(axis=0)
    return (centered.T @ centered) / M.shape[0]


def _top_eigenvector(C: np.ndarray) -> np.ndarray:
    if not np.any(C):
        return np.zeros(C.shape[0])
    sym = (C + C.T) / 2.0
    _, vectors = np.linalg.eigh(sym)
    return apply_sign_convention(vectors[:, -1])


def _discrepancy(Y_K: np.ndarray, Y_R: np.ndarray, v: np.ndarray) -> float:
    """Standardized separation of the two groups along v."""
    proj_k = Y_K @ v
    proj_r = Y_R @ v
    gap = abs(float(proj_k.mean()) - float(proj_r.mean()))
    n_k, n_r = proj_k.size, proj_r.size
    pooled_var = (n_k * float(proj_k.var()) + n_r * float(proj_r.var())) / (n_k + n_r)
    if pooled_var <= 0.0:
        return math.inf if gap > 0.0 else 0.0
    return gap / math.sqrt(pooled_var)


def _contrast_search(
    Y: np.ndarray, member_mask: np.ndarray
) -> tuple[np.ndarray, float, str | None]:
    Y_K = Y[member_mask]
    Y_R = Y[~member_mask]
    cov_all = _population_cov(Y)
    cov_rest = _population_cov(Y_R)
    best_v = None
    best_alpha = 0.0
    best_score = -1.0
    for alpha in ALPHA_GRID:
        v = _top_eigenvector(cov_all - alpha * cov_rest)
        score = 0.0 if not v.any() else _discrepancy(Y_K, Y_R, v)
        # Strict improvement only, so ties resolve to the smaller alpha.
        if score > best_score:
            best_score = score
            best_alpha = alpha
            best_v = v
    if best_v is None or not best_v.any():
        return (
            np.zeros(Y.shape[1]),
            0.0,
            "contrast matrix is zero: no variance to explain",
        )
    if best_score < _DISCREPANCY_FLOOR:
        return (
            _top_eigenvector(cov_all),
            0.0,
            "cluster is indistinguishable from the rest; "
            "returning the plain principal direction",
        )
    return best_v, best_alpha, None


def _check_split(n_rows: int, n_members: int) -> None:
    if n_members < 2:
        raise InputValidationError(
            f"cluster needs at least 2 member rows, got {n_members}"
        )
    if n_rows - n_members < 2:
        raise InputValidationError(
            f"cluster leaves only {n_rows - n_members} background rows; "
            "at least 2 are required"
        )


def feature_contributions(
    Y: np.ndarray, selection: ClusterSelection
) -> tuple[np.ndarray, float]:
    """Unit direction over Y's columns separating the cluster, plus the
    contrast strength that won the automatic search."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise InputValidationError("Y must be a 2-D matrix")
    if not np.isfinite(Y).all():
        raise InputValidationError("Y contains non-finite values")
    mask = selection.membership_vector(Y.shape[0]).astype(bool)
    _check_split(Y.shape[0], int(mask.sum()))
    raw_a, alpha, _ = _contrast_search(Y, mask)
    return raw_a, alpha


def adjust_signs(
    raw_a: np.ndarray, Y: np.ndarray, membership: np.ndarray
) -> tuple[np.ndarray, bool]:
    """Orient the contribution vector to agree with where the cluster sits.

    r_j is the Pearson correlation between membership and column j (0 for a
    constant column); if the agreement score s = r . raw_a is negative the
    whole vector flips.  s = 0 keeps the original signs.
    """
    raw_a = np.asarray(raw_a, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    membership = np.asarray(membership, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[0] != membership.shape[0]:
        raise InputValidationError("membership length must match Y's row count")
    if Y.shape[1] != raw_a.shape[0]:
        raise InputValidationError("raw_a length must match Y's column count")
    m_centered = membership - membership.mean()
    m_norm = float(np.sqrt(np.sum(m_centered**2)))
    r = np.zeros(Y.shape[1])
    if m_norm > 0.0:
        cols = Y - Y.mean(axis=0)
        col_norms = np.sqrt(np.sum(cols**2, axis=0))
        nonconstant = col_norms > 0.0
        r[nonconstant] = (m_centered @ cols[:, nonconstant]) / (
            m_norm * col_norms[nonconstant]
        )
    s = float(r @ raw_a)
    if s < 0.0:
        return -raw_a, True
    return raw_a.copy(), False


def scale_contributions(a_signed: np.ndarray) -> np.ndarray:
    """Divide by the maximum absolute entry; the zero vector stays zero."""
    a_signed = np.asarray(a_signed, dtype=np.float64)
    peak = float(np.max(np.abs(a_signed))) if a_signed.size else 0.0
    if peak == 0.0:
        return a_signed.copy()
    return a_signed / peak


def explain_cluster(Y: np.ndarray, selection: ClusterSelection) -> FeatureContributions:
    """Full explanation pipeline: contrast search, sign adjustment, scaling."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise InputValidationError("Y must be a 2-D matrix")
    if not np.isfinite(Y).all():
        raise InputValidationError("Y contains non-finite values")
    membership = selection.membership_vector(Y.shape[0])
    _check_split(Y.shape[0], int(membership.sum()))
    raw_a, alpha, warning = _contrast_search(Y, membership.astype(bool))
    a_signed, flipped = adjust_signs(raw_a, Y, membership)
    return FeatureContributions(
        a=scale_contributions(a_signed),
        cluster_id=selection.cluster_id,
        alpha=alpha,
        flipped=flipped,
        warning=warning,
    )
