"""Graph representation, edge-list I/O and planted-partition generators."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

# dense matrix powers up to this dimension, sparse products above it
DENSE_POWER_LIMIT = 4096


class EdgeListError(ValueError):
    """Malformed edge-list or label text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on internal nodes ``0..n-1``.

    ``edges`` maps ``(u, v)`` with ``u < v`` to a nonnegative weight.
    ``ext_ids[i]`` is the external integer ID of internal node ``i``.
    """

    n: int
    edges: Mapping[tuple[int, int], float] = field(default_factory=dict)
    ext_ids: tuple[int, ...] = ()
    self_loops_dropped: int = 0

    def __post_init__(self):
        if not self.ext_ids:
            object.__setattr__(self, "ext_ids", tuple(range(self.n)))
        if len(self.ext_ids) != self.n:
            raise ValueError("ext_ids length must equal n")
        clean: dict[tuple[int, int], float] = {}
        for (u, v), w in self.edges.items():
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if w < 0:
                raise ValueError(f"negative weight on edge ({u}, {v})")
            key = (u, v) if u < v else (v, u)
            clean[key] = float(w)
        object.__setattr__(self, "edges", clean)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, ext_ids=None) -> "Graph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples over internal indices."""
        emap = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            emap[(min(u, v), max(u, v))] = w
        return cls(n, emap, tuple(ext_ids) if ext_ids is not None else ())

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        """``(|E|, 2)`` int array of edges sorted by ``(u, v)``."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    def neighbors(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def adjacency(self, weighted: bool = True) -> "SymMatrix":
        keys = self.edge_array()
        if weighted:
            vals = np.array([self.edges[(int(u), int(v))] for u, v in keys], dtype=float)
        else:
            vals = np.ones(len(keys))
        return SymMatrix.from_upper(self.n, keys[:, 0], keys[:, 1], vals)

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        """Copy with the given edges deleted; the node set is unchanged."""
        drop = {(min(u, v), max(u, v)) for u, v in removed}
        kept = {e: w for e, w in self.edges.items() if e not in drop}
        return Graph(self.n, kept, self.ext_ids)


@dataclass(frozen=True)
class SymMatrix:
    """Symmetric real matrix stored as strict upper triangle plus diagonal."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    diag: np.ndarray

    @classmethod
    def from_upper(cls, n, rows, cols, vals, diag=None, keep_zeros=False) -> "SymMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if np.any(rows >= cols):
            raise ValueError("upper-triangle entries need row < col")
        if not keep_zeros:
            keep = vals != 0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        order = np.lexsort((cols, rows))
        diag = np.zeros(n) if diag is None else np.asarray(diag, dtype=float).copy()
        return cls(n, rows[order], cols[order], vals[order], diag)

    @classmethod
    def from_dense(cls, mat: np.ndarray, symmetrize: bool = False) -> "SymMatrix":
        mat = np.asarray(mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("matrix must be square")
        if not symmetrize and not np.array_equal(mat, mat.T):
            raise ValueError("matrix is not symmetric")
        r, c = np.triu_indices(mat.shape[0], k=1)
        return cls.from_upper(mat.shape[0], r, c, mat[r, c], np.diag(mat))

    @classmethod
    def from_sparse(cls, mat) -> "SymMatrix":
        coo = sp.triu(sp.csr_matrix(mat), k=1).tocoo()
        return cls.from_upper(mat.shape[0], coo.row, coo.col, coo.data, mat.diagonal())

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        out[self.rows, self.cols] = self.vals
        out[self.cols, self.rows] = self.vals
        out[np.arange(self.n), np.arange(self.n)] = self.diag
        return out

    def to_csr(self) -> sp.csr_matrix:
        r = np.concatenate([self.rows, self.cols, np.arange(self.n)])
        c = np.concatenate([self.cols, self.rows, np.arange(self.n)])
        v = np.concatenate([self.vals, self.vals, self.diag])
        keep = v != 0
        return sp.csr_matrix((v[keep], (r[keep], c[keep])), shape=(self.n, self.n))

    @property
    def nnz_upper(self) -> int:
        """Undirected off-diagonal pairs with a nonzero value."""
        return int(np.count_nonzero(self.vals))

    def get(self, i: int, j: int) -> float:
        if i == j:
            return float(self.diag[i])
        if i > j:
            i, j = j, i
        lo = np.searchsorted(self.rows, i, side="left")
        hi = np.searchsorted(self.rows, i, side="right")
        k = lo + np.searchsorted(self.cols[lo:hi], j)
        if k < hi and self.cols[k] == j:
            return float(self.vals[k])
        return 0.0

    def row_sums(self) -> np.ndarray:
        out = self.diag.copy()
        np.add.at(out, self.rows, self.vals)
        np.add.at(out, self.cols, self.vals)
        return out

    def same_support(self, other: "SymMatrix") -> bool:
        return (
            np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.diag != 0, other.diag != 0)
        )

    def to_graph(self, ext_ids=None) -> Graph:
        """Off-diagonal entries as a weighted graph (diagonal dropped)."""
        edges = {(int(u), int(v)): float(w) for u, v, w in zip(self.rows, self.cols, self.vals)}
        return Graph(self.n, edges, tuple(ext_ids) if ext_ids is not None else ())


@dataclass(frozen=True)
class PPMParams:
    """Planted partition: ``r`` clusters of ``m`` nodes, within ``p``, across ``q``.

    ``allow_equal`` admits ``p == q`` for degenerate diagnostics only.
    """

    m: int
    r: int
    p: float
    q: float
    allow_equal: bool = False

    def __post_init__(self):
        if self.m < 2 or self.r < 2:
            raise ValueError("need m >= 2 and r >= 2")
        if not (0.0 <= self.q <= 1.0 and 0.0 <= self.p <= 1.0):
            raise ValueError("p and q must lie in [0, 1]")
        if self.q > self.p or (self.q == self.p and not self.allow_equal):
            raise ValueError(f"planted partition requires q < p (got p={self.p}, q={self.q})")

    @property
    def n(self) -> int:
        return self.m * self.r

    def labels(self) -> np.ndarray:
        return np.arange(self.n) // self.m


def load_edge_list(text: str) -> Graph:
    """Parse ``u v`` / ``u v w`` lines; ``#`` starts a comment line.

    External IDs are remapped to internal indices in first-appearance order.
    Repeated undirected edges keep the last weight; self-loops are dropped
    and counted in ``Graph.self_loops_dropped``.
    """
    index: dict[int, int] = {}
    edges: dict[tuple[int, int], float] = {}
    loops = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) < 2:
            raise EdgeListError("expected 'u v [w]'", lineno)
        try:
            a, b = int(tok[0]), int(tok[1])
            w = float(tok[2]) if len(tok) > 2 else 1.0
        except ValueError as exc:
            raise EdgeListError(f"non-numeric token in {line!r}", lineno) from exc
        if not np.isfinite(w):
            raise EdgeListError(f"non-finite weight {tok[2]!r}", lineno)
        if w < 0:
            raise EdgeListError(f"negative weight {w}", lineno)
        for x in (a, b):
            if x not in index:
                index[x] = len(index)
        if a == b:
            loops += 1
            continue
        u, v = index[a], index[b]
        edges[(min(u, v), max(u, v))] = w
    if loops:
        log.warning("dropped %d self-loop line(s)", loops)
    ext = tuple(sorted(index, key=index.get))
    return Graph(len(index), edges, ext, self_loops_dropped=loops)


def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def save_edge_list(g: Graph) -> str:
    """One ``u v w`` line per edge in external IDs, sorted by ``(u, v)``."""
    lines = []
    for (u, v), w in g.edges.items():
        a, b = g.ext_ids[u], g.ext_ids[v]
        lines.append((min(a, b), max(a, b), w))
    lines.sort()
    return "".join(f"{a} {b} {_fmt_weight(w)}\n" for a, b, w in lines)


def load_labels(text: str, g: Graph | None = None) -> dict[int, int] | np.ndarray:
    """Parse ``node_id label`` lines.

    Without a graph returns ``{ext_id: label}``; with one, returns labels
    aligned to internal indices and requires every node to be covered.
    """
    labels: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) != 2:
            raise EdgeListError("expected 'node_id label'", lineno)
        try:
            labels[int(tok[0])] = int(tok[1])
        except ValueError as exc:
            raise EdgeListError(f"non-integer token in {line!r}", lineno) from exc
    if g is None:
        return labels
    missing = [x for x in g.ext_ids if x not in labels]
    if missing:
        raise EdgeListError(f"{len(missing)} node(s) without a label, e.g. {missing[:5]}")
    return np.array([labels[x] for x in g.ext_ids], dtype=np.int64)


def sample_ppm(params: PPMParams, seed: int) -> Graph:
    """Unweighted planted-partition sample; node ``i`` is in cluster ``i // m``."""
    rng = np.random.default_rng(seed)
    n, m = params.n, params.m
    cluster = params.labels()
    rows, cols = [], []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        prob = np.where(cluster[j] == cluster[i], params.p, params.q)
        hit = j[rng.random(n - i - 1) < prob]
        rows.append(np.full(len(hit), i))
        cols.append(hit)
    if rows:
        r, c = np.concatenate(rows), np.concatenate(cols)
    else:
        r = c = np.zeros(0, dtype=np.int64)
    return Graph(n, {(int(a), int(b)): 1.0 for a, b in zip(r, c)})


def expected_ppm_matrix(params: PPMParams) -> SymMatrix:
    """Fully-connected weighted PPM: ``p`` inside clusters (diagonal included), ``q`` across."""
    cluster = params.labels()
    same = cluster[:, None] == cluster[None, :]
    return SymMatrix.from_dense(np.where(same, params.p, params.q))


def matrix_power(mat: SymMatrix, l: int) -> SymMatrix:
    """``mat ** l`` by repeated multiplication (dense below ``DENSE_POWER_LIMIT``)."""
    if l < 1:
        raise ValueError(f"power order must be >= 1, got {l}")
    if mat.n <= DENSE_POWER_LIMIT:
        base = mat.to_dense()
        out = base.copy()
        for _ in range(l - 1):
            out = out @ base
        # mirror the upper triangle so the result is exactly symmetric
        out = np.triu(out) + np.triu(out, 1).T
        return SymMatrix.from_dense(out)
    base = mat.to_csr()
    out = base.copy()
    for _ in range(l - 1):
        out = out @ base
    return SymMatrix.from_sparse(out)


# spec name for the same operation
matrix_power_entry = matrix_power
