"""Pure-Python layout optimizer, the fallback twin of ``_layout_native``.

Performs bit-for-bit the same IEEE double operations in the same order as the
compiled kernel (the extension is built with FP contraction disabled), so
either backend yields identical embeddings for identical inputs.  Keep the
two loops in lockstep when editing.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_MASK32 = 0xFFFFFFFF
_SEED_MIX = 0x9E3779B9


def _xorshift32(state: int) -> int:
    state ^= (state << 13) & _MASK32
    state ^= state >> 17
    state ^= (state << 5) & _MASK32
    return state


def optimize_layout(
    embedding: np.ndarray,
    head: np.ndarray,
    tail: np.ndarray,
    epochs_per_sample: np.ndarray,
    a: float,
    b: float,
    gamma: float,
    initial_alpha: float,
    n_epochs: int,
    negative_sample_rate: int,
    seed: int,
    progress=None,
    progress_every: int = 0,
) -> int:
    """Run the edge-sampling layout SGD in place; returns epochs completed.

    ``progress`` (if given) is called with the completed fraction every
    ``progress_every`` epochs; returning False stops the optimization early.
    """
    n_points = embedding.shape[0]
    n_edges = head.shape[0]
    if progress_every <= 0:
        progress_every = max(1, n_epochs // 50)

    # Flat python lists: ~10x faster than numpy scalar indexing, identical
    # IEEE semantics.
    emb = embedding.reshape(-1).tolist()
    head_l = [int(x) for x in head]
    tail_l = [int(x) for x in tail]
    eps = [float(x) for x in epochs_per_sample]
    epns = [x / negative_sample_rate for x in eps]
    next_sample = list(eps)
    next_neg = list(epns)

    state = (int(seed) & _MASK32) ^ _SEED_MIX
    if state == 0:
        state = _SEED_MIX
    bm1 = b - 1.0
    completed = n_epochs

    for n in range(n_epochs):
        alpha = initial_alpha * (1.0 - n / n_epochs)
        for e in range(n_edges):
            if next_sample[e] > n:
                continue
            i = head_l[e]
            j = tail_l[e]
            ix = 2 * i
            jx = 2 * j
            dx = emb[ix] - emb[jx]
            dy = emb[ix + 1] - emb[jx + 1]
            d2 = dx * dx + dy * dy
            if d2 > 0.0:
                gc = (-2.0 * a * b * d2**bm1) / (a * d2**b + 1.0)
                gx = gc * dx
                gy = gc * dy
                gx = 4.0 if gx > 4.0 else (-4.0 if gx < -4.0 else gx)
                gy = 4.0 if gy > 4.0 else (-4.0 if gy < -4.0 else gy)
                emb[ix] += alpha * gx
                emb[ix + 1] += alpha * gy
                emb[jx] -= alpha * gx
                emb[jx + 1] -= alpha * gy
            next_sample[e] += eps[e]
            n_neg = int((n - next_neg[e]) / epns[e])
            for _ in range(n_neg):
                state = _xorshift32(state)
                k = state % n_points
                if k == i:
                    continue
                kx = 2 * k
                dx = emb[ix] - emb[kx]
                dy = emb[ix + 1] - emb[kx + 1]
                d2 = dx * dx + dy * dy
                if d2 > 0.0:
                    gc = (2.0 * gamma * b) / ((0.001 + d2) * (a * d2**b + 1.0))
                    gx = gc * dx
                    gy = gc * dy
                    gx = 4.0 if gx > 4.0 else (-4.0 if gx < -4.0 else gx)
                    gy = 4.0 if gy > 4.0 else (-4.0 if gy < -4.0 else gy)
                else:
                    # Coincident points get a fixed kick, as in the reference
                    # edge-sampling scheme.
                    gx = 4.0
                    gy = 4.0
                emb[ix] += alpha * gx
                emb[ix + 1] += alpha * gy
            next_neg[e] += n_neg * epns[e]
        done = n + 1
        if progress is not None and (done % progress_every == 0 or done == n_epochs):
            if progress(done / n_epochs) is False:
                completed = done
                break

    embedding[:] = np.asarray(emb, dtype=np.float64).reshape(n_points, 2)
    return completed
