"""Command line entry points.

Subcommands: ``pipeline`` (one mode combination), ``all-combos`` (all six),
``explain`` (feature contributions for a cluster file), ``compare`` (the
baseline comparison) and ``serve`` (the WebSocket analysis server).
Validation problems exit with 2, numerical failures with 3.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from triview.baselines import compare_baselines
from triview.contrast import ClusterSelection, explain_cluster
from triview.dataio import load_dataset
from triview.errors import InputValidationError, NumericalError
from triview.session import (
    PipelineConfig,
    Session,
    color_for_cluster,
    run_pipeline,
)
from triview.stage1 import ModeCombo, all_combos, compress
from triview.stage2 import NeighborParams
from triview.tensor import MODE_NAMES, Mode, standardize

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _add_dataset(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True, help="dataset descriptor path")


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method1", choices=["pca", "mean"], default="pca")
    parser.add_argument("--method2", choices=["linear", "neighbor"], default="neighbor")
    parser.add_argument("--neighbors", type=int, default=15)
    parser.add_argument("--min-dist", type=float, default=0.1)
    parser.add_argument("--epochs", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--bins", type=int, default=20)


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="triview-out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triview",
        description="two-step tensor dimensionality reduction workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="run one mode combination")
    _add_dataset(p)
    p.add_argument("--first", required=True, help="mode compressed in stage 1")
    p.add_argument("--second", required=True, help="mode kept as Y's columns")
    _add_config(p)
    _add_out(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("all-combos", help="run all six mode combinations")
    _add_dataset(p)
    _add_config(p)
    _add_out(p)
    p.set_defaults(func=cmd_all_combos)

    p = sub.add_parser("explain", help="feature contributions for clusters")
    _add_dataset(p)
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.add_argument(
        "--clusters",
        required=True,
        help="text file: one 'row cluster_id' pair per line",
    )
    _add_config(p)
    _add_out(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("compare", help="pipeline vs mean vs flat unfolding")
    _add_dataset(p)
    p.add_argument("--point-mode", required=True, help="mode plotted as points")
    p.add_argument("--labels", help="optional ground-truth label file, one per point")
    _add_config(p)
    _add_out(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="start the analysis server")
    p.add_argument("--dataset", required=True, help="dataset root directory")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory of UI assets to serve")
    p.set_defaults(func=cmd_serve)
    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        method1=args.method1,
        method2=args.method2,
        neighbor=NeighborParams(
            n_neighbors=args.neighbors,
            min_dist=args.min_dist,
            epochs=args.epochs,
            seed=args.seed,
        ),
        bins=args.bins,
    )


def _write_doc(doc: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _result_line(result) -> str:
    emb = result.embedding
    trust = "n/a" if emb.trustworthiness is None else f"{emb.trustworthiness:.3f}"
    return (
        f"{result.combo.key()}: {result.n_points} points, "
        f"quality={result.compressed.quality:.3f}, trustworthiness={trust}"
    )


def cmd_pipeline(args: argparse.Namespace) -> int:
    tensor = load_dataset(args.dataset)
    combo = ModeCombo(Mode.from_name(args.first), Mode.from_name(args.second))
    result = run_pipeline(tensor, combo, _config_from_args(args))
    out = Path(args.out) / f"result-{combo.key()}.json"
    _write_doc(result.to_doc(), out)
    print(_result_line(result))
    print(f"wrote {out}")
    return 0


def cmd_all_combos(args: argparse.Namespace) -> int:
    tensor = load_dataset(args.dataset)
    config = _config_from_args(args)
    index = []
    for combo in all_combos():
        result = run_pipeline(tensor, combo, config)
        out = Path(args.out) / f"result-{combo.key()}.json"
        _write_doc(result.to_doc(), out)
        index.append({"combo": combo.to_doc(), "file": out.name})
        print(_result_line(result))
    _write_doc({"dataset": tensor.name, "results": index}, Path(args.out) / "index.json")
    print(f"wrote 6 results to {args.out}")
    return 0


def read_cluster_file(path: str | Path, n_points: int) -> list[ClusterSelection]:
    """Parse 'row cluster_id' lines into disjoint selections."""
    groups: dict[int, set[int]] = {}
    assigned: set[int] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputValidationError(
                    f"{path}:{lineno}: expected 'row cluster_id', got {line!r}"
                )
            try:
                row, cid = int(parts[0]), int(parts[1])
            except ValueError:
                raise InputValidationError(
                    f"{path}:{lineno}: expected integers, got {line!r}"
                ) from None
            if row < 0 or row >= n_points:
                raise InputValidationError(
                    f"{path}:{lineno}: row index {row} outside [0, {n_points - 1}]"
                )
            if cid < 1:
                raise InputValidationError(
                    f"{path}:{lineno}: cluster ids start at 1, got {cid}"
                )
            if row in assigned:
                raise InputValidationError(
                    f"{path}:{lineno}: row {row} assigned to two clusters"
                )
            assigned.add(row)
            groups.setdefault(cid, set()).add(row)
    if not groups:
        raise InputValidationError(f"{path}: no cluster assignments found")
    return [
        ClusterSelection(
            cluster_id=cid,
            member_rows=frozenset(rows),
            color_index=color_for_cluster(cid),
            label=f"Cluster {cid}",
        )
        for cid, rows in sorted(groups.items())
    ]


def cmd_explain(args: argparse.Namespace) -> int:
    tensor = load_dataset(args.dataset)
    combo = ModeCombo(Mode.from_name(args.first), Mode.from_name(args.second))
    config = _config_from_args(args)
    work = standardize(tensor, combo.first) if config.standardize else tensor
    compressed = compress(work, combo, config.method1)
    selections = read_cluster_file(args.clusters, compressed.Y.shape[0])
    docs = []
    for selection in selections:
        fc = explain_cluster(compressed.Y, selection)
        docs.append({"cluster": selection.to_doc(), "fc": fc.to_doc()})
        print(
            f"cluster {selection.cluster_id}: alpha={fc.alpha:g}, "
            f"flipped={fc.flipped}, peak feature {int(abs(fc.a).argmax())}"
        )
    out = Path(args.out) / f"contributions-{combo.key()}.json"
    _write_doc({"combo": combo.to_doc(), "clusters": docs}, out)
    print(f"wrote {out}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    tensor = load_dataset(args.dataset)
    point_mode = Mode.from_name(args.point_mode)
    labels = None
    if args.labels:
        labels = [
            line.strip()
            for line in Path(args.labels).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    report = compare_baselines(
        tensor,
        point_mode,
        config=_config_from_args(args),
        labels=labels,
        seed=args.seed,
    )
    for entry in report.entries:
        parts = [f"{entry.route}: {entry.n_features} features"]
        trust = entry.embedding.trustworthiness
        if trust is not None:
            parts.append(f"trustworthiness={trust:.3f}")
        if entry.purity is not None:
            parts.append(f"purity={entry.purity:.3f}")
        print(", ".join(parts))
    out = Path(args.out) / f"baselines-{MODE_NAMES[point_mode]}.json"
    _write_doc(report.to_doc(), out)
    print(f"wrote {out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from triview.server import create_app

    root = Path(args.dataset)
    if not root.is_dir():
        raise InputValidationError(f"dataset root {root} is not a directory")
    app = create_app(root, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
