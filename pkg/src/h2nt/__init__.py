"""Motif-based homophily/heterophily network transformation and embedding."""

from .embedding import Embedding, pair_score, pair_scores, read_embedding, write_embedding
from .graph import (
    Graph,
    PPMParams,
    SymMatrix,
    expected_ppm_matrix,
    load_edge_list,
    load_labels,
    matrix_power,
    sample_ppm,
    save_edge_list,
)
from .motif import TransformConfig, TransformResult, transform
from .pipeline import EmbedConfig, embed_graph
from .spectral import SpectralConfig, embed_spectral
from .walk import SgnsConfig, WalkConfig, embed_walk

__version__ = "0.1.0"
