"""Sweep the heterophily weight over the experiment grid for both tasks."""

import argparse

import numpy as np

from h2nt.evaluation import MotifEvalSpec, run_classification, run_motif_eval
from h2nt.graph import PPMParams, sample_ppm
from h2nt.motif import LAMBDA_GRID
from h2nt.pipeline import EmbedConfig, embed_graph
from h2nt.spectral import SpectralConfig
from h2nt.walk import SgnsConfig, WalkConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-walk", action="store_true")
    args = ap.parse_args()

    motif_params = PPMParams(100, 4, 0.3, 0.02)
    class_params = PPMParams(50, 3, 0.4, 0.02)
    g_motif = sample_ppm(motif_params, args.seed)
    g_class = sample_ppm(class_params, args.seed)
    print(f"{'lambda':>7} {'motif P':>9} {'walk acc':>9}")
    for lam in (0.0,) + LAMBDA_GRID:
        cfg = EmbedConfig(lam=lam, spectral=SpectralConfig(d=16))
        prec = run_motif_eval(g_motif, cfg, MotifEvalSpec(200, seed=args.seed), 5).mean_precision
        acc = np.nan
        if not args.skip_walk:
            wcfg = EmbedConfig(lam=lam, backend="walk", walk=WalkConfig(seed=args.seed),
                               sgns=SgnsConfig(seed=args.seed))
            emb, _, _ = embed_graph(g_class, wcfg)
            acc = run_classification(emb, class_params.labels(), 0.1, 10, seed=args.seed).accuracy
        print(f"{lam:7.1f} {prec:9.4f} {acc:9.4f}")


if __name__ == "__main__":
    main()
