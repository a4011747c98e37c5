"""Transform-then-embed composition shared by the CLI and the evaluation harness."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

from .embedding import Embedding
from .graph import Graph
from .motif import TransformConfig, TransformResult, transform
from .spectral import SpectralConfig, embed_spectral
from .walk import SgnsConfig, WalkConfig, embed_walk


@dataclass(frozen=True)
class EmbedConfig:
    lam: float = 0.0
    backend: str = "spectral"
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    walk: WalkConfig = field(default_factory=WalkConfig)
    sgns: SgnsConfig = field(default_factory=SgnsConfig)

    def __post_init__(self):
        if self.backend not in ("spectral", "walk"):
            raise ValueError(f"unknown backend {self.backend!r}")
        TransformConfig(self.lam)

    def echo(self) -> dict:
        out = {"lambda": self.lam, "backend": self.backend}
        if self.backend == "spectral":
            out["spectral"] = asdict(self.spectral)
        else:
            out["walk"] = asdict(self.walk)
            out["sgns"] = asdict(self.sgns)
        return out


def embed_graph(g: Graph, cfg: EmbedConfig) -> tuple[Embedding, TransformResult, dict]:
    """Run the motif transform and the chosen backend; returns timings too."""
    t0 = time.perf_counter()
    res = transform(g, TransformConfig(cfg.lam))
    t1 = time.perf_counter()
    if cfg.backend == "spectral":
        emb = embed_spectral(res.q, cfg.spectral, ids=g.ext_ids)
    else:
        emb = embed_walk(res.q, cfg.walk, cfg.sgns, ids=g.ext_ids)
    t2 = time.perf_counter()
    emb.meta["lambda"] = cfg.lam
    return emb, res, {"transform": t1 - t0, "embed": t2 - t1}
