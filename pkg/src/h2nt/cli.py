"""``h2nt`` command line: transform, embed, eval, verify.

Exit codes: 0 success, 1 failed check or evaluation error, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import lemmas
from .embedding import read_embedding, sidecar_path, write_embedding
from .evaluation import MotifEvalSpec, SamplingError, run_classification, run_motif_eval
from .graph import EdgeListError, PPMParams, load_edge_list, load_labels, save_edge_list
from .motif import LAMBDA_GRID, TransformConfig, sparsity_stats, transform, transformed_graph
from .pipeline import EmbedConfig, embed_graph
from .spectral import ConvergenceError, SpectralConfig
from .walk import SgnsConfig, WalkConfig, save_walks

log = logging.getLogger("h2nt")


class UsageError(Exception):
    pass


def _read_graph(path):
    return load_edge_list(Path(path).read_text())


def _weights(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must be comma-separated numbers: {text!r}")


def _nonneg(text):
    x = float(text)
    if x < 0:
        raise argparse.ArgumentTypeError(f"expected a value >= 0, got {text}")
    return x


def _backend_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("transform / backend")
    g.add_argument("--lambda", dest="lam", type=_nonneg, default=0.0,
                   help=f"heterophily weight (grid used in experiments: {LAMBDA_GRID})")
    g.add_argument("--backend", choices=("spectral", "walk"), default="spectral")
    g.add_argument("--dim", type=int, default=None,
                   help="embedding dimension (default 16 if n < 2000 else 128)")
    g.add_argument("--order", type=int, default=3, help="highest proximity order (spectral)")
    g.add_argument("--weights", type=_weights, default=None,
                   help="comma-separated proximity weights w_1..w_l (default 0.1^i)")
    g.add_argument("--score", choices=("signed", "dot"), default="signed",
                   help="spectral pair score: signed reweighted product or plain dot")
    g.add_argument("--walks", type=int, default=10, help="walks per node")
    g.add_argument("--walk-length", type=int, default=40)
    g.add_argument("--window", type=int, default=5)
    g.add_argument("--negatives", type=int, default=5)
    g.add_argument("--epochs", type=int, default=5)
    g.add_argument("--lr", type=float, default=0.025, help="initial SGNS learning rate")
    g.add_argument("--parallel", action="store_true",
                   help="asynchronous multi-threaded SGNS (not reproducible; H2NT_THREADS caps threads)")
    g.add_argument("--seed", type=int, default=0)
    return p


def _embed_config(args, n: int) -> EmbedConfig:
    d = args.dim
    spectral = SpectralConfig(d=d, order=args.order, weights=args.weights, seed=args.seed,
                              score=args.score)
    walk = WalkConfig(args.walks, args.walk_length, args.seed)
    sgns_d = d if d is not None else (16 if n < 2000 else 128)
    sgns = SgnsConfig(d=sgns_d, window=args.window, negatives=args.negatives, epochs=args.epochs,
                      lr_init=args.lr, seed=args.seed, parallel=args.parallel)
    return EmbedConfig(lam=args.lam, backend=args.backend, spectral=spectral, walk=walk, sgns=sgns)


def cmd_transform(args) -> int:
    g = _read_graph(args.input)
    res = transform(g, TransformConfig(args.lam, keep_isolated=not args.drop_isolated))
    qg = transformed_graph(g, res)
    if qg.num_edges == 0:
        log.warning("input has no triangles; the transformed network is empty")
    Path(args.output).write_text(save_edge_list(qg))
    stats = sparsity_stats(g, res) | {"lambda": args.lam}
    if args.stats_out:
        Path(args.stats_out).write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")
    log.info("kept %d of %d edges", stats["motif_edges"], stats["edges"])
    return 0


def cmd_embed(args) -> int:
    g = _read_graph(args.input)
    cfg = _embed_config(args, g.n)
    emb, res, _ = embed_graph(g, cfg)
    meta_path = args.meta_out or sidecar_path(args.output)
    write_embedding(emb, args.output, meta_path)
    if args.walks_out and cfg.backend == "walk":
        from .walk import generate_walks
        Path(args.walks_out).write_text(save_walks(generate_walks(res.q, cfg.walk), g.ext_ids))
    return 0


def cmd_eval(args) -> int:
    if args.task == "motif":
        g = _read_graph(args.input)
        cfg = _embed_config(args, g.n)
        spec = MotifEvalSpec(args.test_triangles, args.negative_ratio, args.n_p_max, args.seed)
        report = run_motif_eval(g, cfg, spec, repeats=args.repeats or 5)
    else:
        if not args.labels:
            raise UsageError(f"--labels is required for task {args.task!r}")
        ratio = args.train_ratio if args.train_ratio is not None else (0.1 if args.task == "classify" else 0.9)
        if args.embedding:
            emb = read_embedding(args.embedding)
            labels_by_id = load_labels(Path(args.labels).read_text())
            missing = [i for i in emb.ids if i not in labels_by_id]
            if missing:
                raise EdgeListError(f"{len(missing)} embedded node(s) without a label")
            labels = [labels_by_id[i] for i in emb.ids]
            echo = {"embedding": str(args.embedding)}
        else:
            g = _read_graph(args.input)
            labels = load_labels(Path(args.labels).read_text(), g)
            cfg = _embed_config(args, g.n)
            emb, _, _ = embed_graph(g, cfg)
            echo = cfg.echo()
        report = run_classification(emb, labels, ratio, repeats=args.repeats or 10, l2=args.l2,
                                    seed=args.seed, config={"task": args.task, **echo})
        report.config["task"] = args.task
    text = report.to_json(timing=not args.no_timing)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv and report.precision_curve:
        Path(args.csv).write_text(report.to_csv())
    return 0


def _load_grid(path):
    rows = json.loads(Path(path).read_text())
    return tuple(PPMParams(int(r["m"]), int(r["r"]), float(r["p"]), float(r["q"])) for r in rows)


def cmd_verify(args) -> int:
    grid = _load_grid(args.grid) if args.grid else lemmas.DEFAULT_GRID
    reports = lemmas.run_suite(grid, args.l_max, n_samples=args.samples, seed=args.seed,
                               rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                               triangle_tol=args.triangle_tol)
    for r in reports:
        print(r.summary())
    if args.report:
        Path(args.report).write_text(lemmas.reports_to_json(reports))
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="h2nt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    backend = _backend_parser()

    p = sub.add_parser("transform", help="write Q = A_M + lambda H as a weighted edge list")
    p.add_argument("--input", required=True, help="edge list 'u v [w]'")
    p.add_argument("--output", required=True, help="weighted edge list of Q")
    p.add_argument("--lambda", dest="lam", type=_nonneg, default=0.0,
                   help=f"heterophily weight (grid used in experiments: {LAMBDA_GRID})")
    p.add_argument("--stats-out", help="JSON file for sparsity statistics")
    p.add_argument("--drop-isolated", action="store_true",
                   help="omit nodes in no triangle (they never appear in the edge list anyway)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("embed", parents=[backend], help="transform then embed")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="embedding file ('n d' header)")
    p.add_argument("--meta-out", help="metadata JSON (default: <output>.meta.json)")
    p.add_argument("--walks-out", help="walk corpus text (walk backend only)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("eval", parents=[backend], help="motif prediction or label classification")
    p.add_argument("--task", choices=("motif", "classify", "role"), default="motif",
                   help="'role' is classification on structural-role labels (train ratio 0.9)")
    p.add_argument("--input", help="edge list (required unless --embedding is given)")
    p.add_argument("--labels", help="'node_id label' file for classify/role")
    p.add_argument("--embedding", help="precomputed embedding for classify/role")
    p.add_argument("--test-triangles", type=int, default=200)
    p.add_argument("--negative-ratio", type=int, default=10)
    p.add_argument("--n-p-max", type=int, default=None, help="largest N of precision@N (default: #test triangles)")
    p.add_argument("--train-ratio", type=float, default=None)
    p.add_argument("--l2", type=float, default=1.0, help="L2 strength of the logistic regression")
    p.add_argument("--repeats", type=int, default=None, help="default 5 (motif) / 10 (classification)")
    p.add_argument("--report", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="precision curve as CSV")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock timings from the report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run the planted-partition lemma checks")
    p.add_argument("--grid", help="JSON list of {m, r, p, q} (default: built-in grid)")
    p.add_argument("--l-max", type=int, default=6)
    p.add_argument("--samples", type=int, default=500, help="graphs sampled for the triangle lemma")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rel-tol", type=_nonneg, default=1e-9, help="closed-form gap tolerance")
    p.add_argument("--abs-tol", type=_nonneg, default=1e-12, help="symmetry tolerance")
    p.add_argument("--triangle-tol", type=_nonneg, default=0.05, help="triangle-lemma relative tolerance")
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.command == "eval" and not (args.input or args.embedding):
        parser.error("eval needs --input or --embedding")
    try:
        return args.func(args)
    except (ConvergenceError, SamplingError) as exc:
        print(f"h2nt {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, UsageError, ValueError) as exc:
        print(f"h2nt {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
