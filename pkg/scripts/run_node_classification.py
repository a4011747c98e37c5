"""Node classification with cluster labels, walk or spectral backend."""

import argparse

from h2nt.evaluation import run_classification
from h2nt.graph import PPMParams, sample_ppm
from h2nt.pipeline import EmbedConfig, embed_graph
from h2nt.spectral import SpectralConfig
from h2nt.walk import SgnsConfig, WalkConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=50)
    ap.add_argument("--r", type=int, default=3)
    ap.add_argument("--p", type=float, default=0.4)
    ap.add_argument("--q", type=float, default=0.02)
    ap.add_argument("--lam", type=float, default=0.1)
    ap.add_argument("--backend", choices=("walk", "spectral"), default="walk")
    ap.add_argument("--train-ratio", type=float, default=0.1)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    params = PPMParams(args.m, args.r, args.p, args.q)
    g = sample_ppm(params, args.seed)
    cfg = EmbedConfig(lam=args.lam, backend=args.backend, spectral=SpectralConfig(seed=args.seed),
                      walk=WalkConfig(seed=args.seed), sgns=SgnsConfig(seed=args.seed))
    emb, res, timing = embed_graph(g, cfg)
    rep = run_classification(emb, params.labels(), args.train_ratio, args.repeats, seed=args.seed)
    print(f"{args.backend}: accuracy {rep.accuracy:.4f} (range {min(rep.accuracies):.3f}..{max(rep.accuracies):.3f})"
          f"  dead nodes {len(res.dead_nodes)}  embed {timing['embed']:.2f}s")


if __name__ == "__main__":
    main()
