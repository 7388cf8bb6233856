"""Time the compiled layout kernel against the pure-Python twin.

The two kernels must agree byte for byte; this script asserts that before
reporting timings, so a speedup number is only ever printed for equivalent
work.

    python3 benchmarks/bench_layout.py --rows 400 --epochs 300
"""

import argparse
import statistics
import time

import numpy as np

from triview import _layout_py
from triview.stage2 import (
    _edge_schedule,
    _pca_coordinates,
    fit_curve_params,
    neighbor_graph,
)

try:
    from triview import _layout_native
except ImportError:
    _layout_native = None


def build_problem(rows: int, dim: int, epochs: int, n_neighbors: int):
    rng = np.random.default_rng(0)
    centers = rng.normal(scale=10.0, size=(3, dim))
    Y = np.vstack([rng.normal(size=(rows // 3 + 1, dim)) + c for c in centers])[:rows]
    weights = neighbor_graph(Y, n_neighbors)
    head, tail, eps = _edge_schedule(weights, epochs)
    a, b = fit_curve_params(0.1)
    init = _pca_coordinates(Y)[0]
    init = init / np.abs(init).max() * 10.0
    return init, head, tail, eps, a, b


def run(module, problem, epochs: int, seed: int) -> tuple[np.ndarray, float]:
    init, head, tail, eps, a, b = problem
    emb = np.ascontiguousarray(init, dtype=np.float64).copy()
    started = time.perf_counter()
    module.optimize_layout(emb, head, tail, eps, a, b, 1.0, 1.0, epochs, 5, seed)
    return emb, time.perf_counter() - started


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=400)
    parser.add_argument("--dim", type=int, default=8)
    parser.add_argument("--epochs", type=int, default=300)
    parser.add_argument("--neighbors", type=int, default=15)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    problem = build_problem(args.rows, args.dim, args.epochs, args.neighbors)
    print(
        f"layout benchmark: {args.rows} rows, {len(problem[1])} directed edges, "
        f"{args.epochs} epochs, {args.repeats} repeats"
    )

    py_times = []
    py_emb = None
    for _ in range(args.repeats):
        py_emb, elapsed = run(_layout_py, problem, args.epochs, args.seed)
        py_times.append(elapsed)
    py_best = min(py_times)
    print(f"python backend: best {py_best:.3f}s, median {statistics.median(py_times):.3f}s")

    if _layout_native is None:
        print("native backend: not built (pip install -e . compiles it)")
        return 0

    native_times = []
    native_emb = None
    for _ in range(args.repeats):
        native_emb, elapsed = run(_layout_native, problem, args.epochs, args.seed)
        native_times.append(elapsed)
    native_best = min(native_times)
    print(
        f"native backend: best {native_best:.3f}s, "
        f"median {statistics.median(native_times):.3f}s"
    )

    if not np.array_equal(py_emb, native_emb):
        raise SystemExit("backends disagree; timings are meaningless")
    print(f"outputs bit-identical; speedup {py_best / native_best:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
