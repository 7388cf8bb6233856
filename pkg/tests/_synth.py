"""Synthetic data generators shared by the unit and acceptance tests."""

from __future__ import annotations

import numpy as np

from triview import Tensor3


def label_range(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def make_tensor(rng: np.random.Generator, T: int, N: int, D: int, name="synthetic") -> Tensor3:
    return Tensor3(
        values=rng.normal(size=(T, N, D)),
        time_labels=label_range("t", T),
        instance_labels=label_range("n", N),
        variable_labels=label_range("v", D),
        name=name,
    )


def counting_tensor() -> Tensor3:
    """The 2x2x2 fixture with x[t,n,d] = 100t + 10n + d."""
    values = np.zeros((2, 2, 2))
    for t in range(2):
        for n in range(2):
            for d in range(2):
                values[t, n, d] = 100 * t + 10 * n + d
    return Tensor3(
        values=values,
        time_labels=["t0", "t1"],
        instance_labels=["n0", "n1"],
        variable_labels=["v0", "v1"],
        name="counting",
    )


def blob_matrix(
    rng: np.random.Generator,
    n_per_blob: int = 100,
    dim: int = 5,
    spread: float = 0.5,
    separation: float = 10.0,
    n_blobs: int = 3,
) -> tuple[np.ndarray, np.ndarray]:
    """Well-separated Gaussian blobs; returns (rows, blob labels)."""
    centers = rng.normal(size=(n_blobs, dim))
    centers *= separation / max(
        1e-12, np.linalg.norm(centers[0] - centers[1])
    )
    rows = np.vstack(
        [rng.normal(loc=c, scale=spread, size=(n_per_blob, dim)) for c in centers]
    )
    labels = np.repeat(np.arange(n_blobs), n_per_blob)
    return rows, labels


def planted_cluster_matrix(
    rng: np.random.Generator,
    rows: int = 200,
    cols: int = 10,
    members: int = 30,
    shift: float = 10.0,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Background N(0,1) everywhere except one shifted column inside a
    planted cluster; returns (Y, member row indices, planted column)."""
    Y = rng.normal(size=(rows, cols))
    member_rows = rng.choice(rows, size=members, replace=False)
    planted_col = int(rng.integers(cols))
    Y[member_rows, planted_col] += shift
    return Y, np.sort(member_rows), planted_col


def two_group_tensor(
    rng: np.random.Generator,
    T: int = 40,
    N: int = 120,
    D: int = 8,
    uniform: bool = False,
    noise: float = 0.3,
) -> tuple[Tensor3, np.ndarray]:
    """Two instance groups that differ only via a variable-weighted signal.

    Heterogeneous weights mix signs and cancel on average, so plain mean
    compression buries the group signal while a fitted direction keeps it;
    uniform weights leave both routes equivalent.
    """
    if uniform:
        u = np.ones(D)
    else:
        base = np.array([2.0, -1.0, 1.5, -2.0, 1.0, -1.5, 0.5, -0.5])
        u = np.resize(base, D)
    steps = np.arange(T) / T
    signals = np.stack([np.sin(2 * np.pi * steps), np.cos(2 * np.pi * steps)])
    groups = np.repeat([0, 1], (N + 1) // 2)[:N]
    values = np.empty((T, N, D))
    for n in range(N):
        s = signals[groups[n]]
        values[:, n, :] = np.outer(s, u)
    values += rng.normal(scale=noise, size=values.shape)
    tensor = Tensor3(
        values=values,
        time_labels=label_range("t", T),
        instance_labels=label_range("n", N),
        variable_labels=label_range("v", D),
        name="two-group",
    )
    return tensor, groups
