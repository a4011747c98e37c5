"""Node embedding container and its text/JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Embedding:
    """``n x d`` node representation aligned with a graph's external IDs.

    ``meta["signs"]``, when present, holds one +-1 per column; pair scores
    are then the signed inner product ``sum_k sign_k x_ik x_jk``.
    """

    matrix: np.ndarray
    ids: tuple[int, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2:
            raise ValueError("embedding matrix must be 2-D")
        if len(self.ids) != mat.shape[0]:
            raise ValueError("ids must align with matrix rows")
        if not np.all(np.isfinite(mat)):
            raise ValueError("embedding contains NaN or Inf")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "ids", tuple(int(x) for x in self.ids))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    @property
    def signs(self) -> np.ndarray:
        """Per-column sign carrier used by ``pair_score`` (all ones if unsigned)."""
        s = self.meta.get("signs")
        if s is None or self.meta.get("score", "signed") == "dot":
            return np.ones(self.d)
        return np.asarray(s, dtype=float)


def pair_score(emb: Embedding, i: int, j: int) -> float:
    if not (0 <= i < emb.n and 0 <= j < emb.n):
        raise IndexError(f"node index out of range for n={emb.n}: ({i}, {j})")
    x = emb.matrix
    return float(np.sum(emb.signs * x[i] * x[j]))


def pair_scores(emb: Embedding, i, j) -> np.ndarray:
    """Vectorised ``pair_score`` over index arrays."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    if i.size and (min(i.min(), j.min()) < 0 or max(i.max(), j.max()) >= emb.n):
        raise IndexError(f"node index out of range for n={emb.n}")
    x = emb.matrix
    return np.einsum("ij,ij,j->i", x[i], x[j], emb.signs)


def write_embedding(emb: Embedding, path, meta_path=None) -> None:
    """Header ``n d``, then ``ext_id f_1 .. f_d`` rows at 9 significant digits."""
    path = Path(path)
    lines = [f"{emb.n} {emb.d}\n"]
    for ext, row in zip(emb.ids, emb.matrix):
        lines.append(" ".join([str(ext)] + [f"{v:.9g}" for v in row]) + "\n")
    path.write_text("".join(lines))
    meta_path = Path(meta_path) if meta_path is not None else sidecar_path(path)
    meta_path.write_text(json.dumps(emb.meta, indent=2, sort_keys=True) + "\n")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def read_embedding(path, meta_path=None) -> Embedding:
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty embedding file")
    n, d = (int(x) for x in lines[0].split())
    if len(lines) - 1 != n:
        raise ValueError(f"{path}: header says {n} rows, found {len(lines) - 1}")
    ids, rows = [], []
    for ln in lines[1:]:
        tok = ln.split()
        if len(tok) != d + 1:
            raise ValueError(f"{path}: expected {d + 1} fields, got {len(tok)}")
        ids.append(int(tok[0]))
        rows.append([float(t) for t in tok[1:]])
    meta_path = Path(meta_path) if meta_path is not None else sidecar_path(path)
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return Embedding(np.array(rows, dtype=float).reshape(n, d), tuple(ids), meta)
