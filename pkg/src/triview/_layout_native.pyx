# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled layout optimizer.

Bit-identical twin of ``_layout_py.optimize_layout``: same operation order,
same libm pow, and the build disables FP contraction so no FMA fusion can
change results.  Keep the two loops in lockstep when editing.
"""

import numpy as np

from libc.math cimport pow

BACKEND = "native"

cdef unsigned int _MASK32 = 0xFFFFFFFFu
cdef unsigned int _SEED_MIX = 0x9E3779B9u


cdef inline unsigned int _xorshift32(unsigned int state) nogil:
    state ^= state << 13
    state ^= state >> 17
    state ^= state << 5
    return state


cdef inline double _clip4(double v) nogil:
    if v > 4.0:
        return 4.0
    if v < -4.0:
        return -4.0
    return v


def optimize_layout(
    embedding,
    head,
    tail,
    epochs_per_sample,
    double a,
    double b,
    double gamma,
    double initial_alpha,
    int n_epochs,
    int negative_sample_rate,
    seed,
    progress=None,
    int progress_every=0,
):
    """Run the edge-sampling layout SGD in place; returns epochs completed."""
    cdef double[:, ::1] emb = embedding
    cdef long[::1] head_v = np.ascontiguousarray(head, dtype=np.int64)
    cdef long[::1] tail_v = np.ascontiguousarray(tail, dtype=np.int64)
    cdef double[::1] eps = np.ascontiguousarray(epochs_per_sample, dtype=np.float64)

    cdef int n_points = emb.shape[0]
    cdef int n_edges = head_v.shape[0]
    if progress_every <= 0:
        progress_every = max(1, n_epochs // 50)

    cdef double[::1] epns = np.empty(n_edges, dtype=np.float64)
    cdef double[::1] next_sample = np.empty(n_edges, dtype=np.float64)
    cdef double[::1] next_neg = np.empty(n_edges, dtype=np.float64)
    cdef Py_ssize_t e
    for e in range(n_edges):
        epns[e] = eps[e] / negative_sample_rate
        next_sample[e] = eps[e]
        next_neg[e] = epns[e]

    cdef unsigned int state = (<unsigned int>(<unsigned long>seed & 0xFFFFFFFFUL)) ^ _SEED_MIX
    if state == 0:
        state = _SEED_MIX

    cdef double bm1 = b - 1.0
    cdef int completed = n_epochs
    cdef int n, done, n_neg, p
    cdef long i, j, k
    cdef double alpha, dx, dy, d2, gc, gx, gy

    for n in range(n_epochs):
        alpha = initial_alpha * (1.0 - (<double>n) / (<double>n_epochs))
        with nogil:
            for e in range(n_edges):
                if next_sample[e] > n:
                    continue
                i = head_v[e]
                j = tail_v[e]
                dx = emb[i, 0] - emb[j, 0]
                dy = emb[i, 1] - emb[j, 1]
                d2 = dx * dx + dy * dy
                if d2 > 0.0:
                    gc = (-2.0 * a * b * pow(d2, bm1)) / (a * pow(d2, b) + 1.0)
                    gx = _clip4(gc * dx)
                    gy = _clip4(gc * dy)
                    emb[i, 0] += alpha * gx
                    emb[i, 1] += alpha * gy
                    emb[j, 0] -= alpha * gx
                    emb[j, 1] -= alpha * gy
                next_sample[e] += eps[e]
                n_neg = <int>(((<double>n) - next_neg[e]) / epns[e])
                for p in range(n_neg):
                    state = _xorshift32(state)
                    k = <long>(state % <unsigned int>n_points)
                    if k == i:
                        continue
                    dx = emb[i, 0] - emb[k, 0]
                    dy = emb[i, 1] - emb[k, 1]
                    d2 = dx * dx + dy * dy
                    if d2 > 0.0:
                        gc = (2.0 * gamma * b) / ((0.001 + d2) * (a * pow(d2, b) + 1.0))
                        gx = _clip4(gc * dx)
                        gy = _clip4(gc * dy)
                    else:
                        gx = 4.0
                        gy = 4.0
                    emb[i, 0] += alpha * gx
                    emb[i, 1] += alpha * gy
                next_neg[e] += n_neg * epns[e]
        done = n + 1
        if progress is not None and (done % progress_every == 0 or done == n_epochs):
            if progress((<double>done) / (<double>n_epochs)) is False:
                completed = done
                break

    return completed
