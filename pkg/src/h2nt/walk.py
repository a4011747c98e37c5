"""Q-biased first-order random walks and skip-gram with negative sampling."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numba
import numpy as np

from .embedding import Embedding
from .graph import SymMatrix


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 40
    seed: int = 0

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.walk_length < 2:
            raise ValueError("walk_length must be >= 2")


@dataclass(frozen=True)
class SgnsConfig:
    d: int = 16
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr_init: float = 0.025
    seed: int = 0
    parallel: bool = False

    def __post_init__(self):
        if self.d < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("d, window, negatives and epochs must all be >= 1")
        if not self.lr_init > 0:
            raise ValueError("lr_init must be positive")


def build_alias(weights) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias table ``(prob, alias)`` for an unnormalised weight vector."""
    w = np.asarray(weights, dtype=float)
    k = len(w)
    total = w.sum()
    if k == 0 or total <= 0:
        raise ValueError("alias table needs positive total weight")
    scaled = w * (k / total)
    prob = np.ones(k)
    alias = np.arange(k)
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s, g = small.pop(), large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = scaled[g] + scaled[s] - 1.0
        (small if scaled[g] < 1.0 else large).append(g)
    # leftovers are 1 up to rounding
    for i in small + large:
        prob[i] = 1.0
        alias[i] = i
    return prob, alias


@dataclass(frozen=True)
class TransitionTable:
    """Per-node alias tables packed CSR-style.

    Row ``i`` occupies ``indptr[i]:indptr[i+1]``; ``alias`` holds absolute
    positions into ``nbrs``.
    """

    indptr: np.ndarray
    nbrs: np.ndarray
    prob: np.ndarray
    alias: np.ndarray
    dead: np.ndarray

    def probabilities(self, i: int) -> dict[int, float]:
        """Exact transition distribution implied by the alias table of node ``i``."""
        a, b = self.indptr[i], self.indptr[i + 1]
        k = b - a
        out: dict[int, float] = {}
        for pos in range(a, b):
            out[int(self.nbrs[pos])] = out.get(int(self.nbrs[pos]), 0.0) + self.prob[pos] / k
            other = int(self.nbrs[self.alias[pos]])
            out[other] = out.get(other, 0.0) + (1.0 - self.prob[pos]) / k
        return out

    def draw(self, nodes, u1, u2) -> np.ndarray:
        """Next node for each current node given two uniforms per draw."""
        nodes = np.asarray(nodes)
        start = self.indptr[nodes]
        deg = self.indptr[nodes + 1] - start
        slot = start + np.minimum((u1 * deg).astype(np.int64), deg - 1)
        take = u2 < self.prob[slot]
        return np.where(take, self.nbrs[slot], self.nbrs[self.alias[slot]])


def build_transition(q: SymMatrix) -> TransitionTable:
    """Sample neighbour ``j`` of ``i`` with probability ``Q(i,j) / sum_k Q(i,k)``."""
    csr = q.to_csr()
    csr.setdiag(0)
    csr.eliminate_zeros()
    csr.sort_indices()
    indptr = csr.indptr.astype(np.int64)
    nbrs = csr.indices.astype(np.int64)
    prob = np.ones(len(nbrs))
    alias = np.arange(len(nbrs), dtype=np.int64)
    for i in range(q.n):
        a, b = indptr[i], indptr[i + 1]
        if b > a:
            p, al = build_alias(csr.data[a:b])
            prob[a:b] = p
            alias[a:b] = al + a
    dead = np.diff(indptr) == 0
    return TransitionTable(indptr, nbrs, prob, alias, dead)


def generate_walks(q: SymMatrix, cfg: WalkConfig = WalkConfig(),
                   table: TransitionTable | None = None) -> np.ndarray:
    """``(walks_per_node * alive, walk_length)`` array of internal node IDs.

    Round ``k`` visits live nodes in an order shuffled by ``(seed, k)``; the
    walk started at node ``v`` in round ``k`` draws from its own stream
    seeded by ``(seed, v, k)``, so the result does not depend on how walks
    are scheduled.
    """
    table = build_transition(q) if table is None else table
    alive = np.flatnonzero(~table.dead)
    L = cfg.walk_length
    if alive.size == 0:
        return np.zeros((0, L), dtype=np.int64)
    starts = []
    for k in range(cfg.walks_per_node):
        starts.append((np.random.default_rng([cfg.seed, k]).permutation(alive), k))
    start_nodes = np.concatenate([s for s, _ in starts])
    rounds = np.concatenate([np.full(len(s), k) for s, k in starts])
    u = np.empty((len(start_nodes), L - 1, 2))
    for w, (v, k) in enumerate(zip(start_nodes, rounds)):
        u[w] = np.random.default_rng([cfg.seed, int(v), int(k)]).random((L - 1, 2))
    walks = np.empty((len(start_nodes), L), dtype=np.int64)
    walks[:, 0] = start_nodes
    for t in range(1, L):
        walks[:, t] = table.draw(walks[:, t - 1], u[:, t - 1, 0], u[:, t - 1, 1])
    return walks


def save_walks(walks, ext_ids) -> str:
    """One walk per line, space-separated external IDs."""
    ext = np.asarray(ext_ids)
    return "".join(" ".join(str(x) for x in ext[np.asarray(w)]) + "\n" for w in walks)


def _flatten(corpus) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(corpus, np.ndarray) and corpus.ndim == 2:
        tokens = corpus.astype(np.int64).ravel()
        offsets = np.arange(0, tokens.size + 1, corpus.shape[1], dtype=np.int64)
        if corpus.shape[1] == 0:
            offsets = np.zeros(1, dtype=np.int64)
        return tokens, offsets
    seqs = [np.asarray(s, dtype=np.int64) for s in corpus]
    lengths = np.array([len(s) for s in seqs], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    tokens = np.concatenate(seqs) if seqs else np.zeros(0, dtype=np.int64)
    return tokens, offsets


@numba.njit(cache=True)
def _sgd_walk(tokens, a, b, w_in, w_out, cdf, window, negatives, lr, grad):
    d = w_in.shape[1]
    loss = 0.0
    pairs = 0
    for pos in range(a, b):
        center = tokens[pos]
        lo = max(a, pos - window)
        hi = min(b, pos + window + 1)
        for cpos in range(lo, hi):
            if cpos == pos:
                continue
            ctx = tokens[cpos]
            for k in range(d):
                grad[k] = 0.0
            for t in range(negatives + 1):
                if t == 0:
                    target = ctx
                    label = 1.0
                else:
                    target = np.searchsorted(cdf, np.random.random(), side="right")
                    if target >= cdf.shape[0]:
                        target = cdf.shape[0] - 1
                    if target == ctx:
                        continue
                    label = 0.0
                f = 0.0
                for k in range(d):
                    f += w_in[center, k] * w_out[target, k]
                if f > 30.0:
                    f = 30.0
                elif f < -30.0:
                    f = -30.0
                sig = 1.0 / (1.0 + np.exp(-f))
                if label > 0.5:
                    loss -= np.log(sig + 1e-12)
                else:
                    loss -= np.log(1.0 - sig + 1e-12)
                g = (label - sig) * lr
                for k in range(d):
                    grad[k] += g * w_out[target, k]
                    w_out[target, k] += g * w_in[center, k]
            for k in range(d):
                w_in[center, k] += grad[k]
            pairs += 1
    return loss, pairs


@numba.njit(cache=True)
def _train_serial(tokens, offsets, w_in, w_out, cdf, window, negatives, epochs, lr0, lr_min, seed):
    np.random.seed(seed)
    n_walks = offsets.shape[0] - 1
    losses = np.zeros(epochs)
    grad = np.zeros(w_in.shape[1])
    total = epochs * n_walks
    step = 0
    for ep in range(epochs):
        loss = 0.0
        pairs = 0
        for s in range(n_walks):
            lr = lr0 - (lr0 - lr_min) * step / max(total - 1, 1)
            step += 1
            l, p = _sgd_walk(tokens, offsets[s], offsets[s + 1], w_in, w_out, cdf,
                             window, negatives, lr, grad)
            loss += l
            pairs += p
        losses[ep] = loss / max(pairs, 1)
    return losses


@numba.njit(cache=True, parallel=True)
def _train_hogwild(tokens, offsets, w_in, w_out, cdf, window, negatives, epochs, lr0, lr_min, seed):
    n_walks = offsets.shape[0] - 1
    losses = np.zeros(epochs)
    total = epochs * n_walks
    for ep in range(epochs):
        loss = np.zeros(n_walks)
        pairs = np.zeros(n_walks)
        for s in numba.prange(n_walks):
            np.random.seed(seed + ep * n_walks + s)
            grad = np.zeros(w_in.shape[1])
            lr = lr0 - (lr0 - lr_min) * (ep * n_walks + s) / max(total - 1, 1)
            l, p = _sgd_walk(tokens, offsets[s], offsets[s + 1], w_in, w_out, cdf,
                             window, negatives, lr, grad)
            loss[s] = l
            pairs[s] = p
        losses[ep] = loss.sum() / max(pairs.sum(), 1.0)
    return losses


def worker_threads() -> int:
    env = os.environ.get("H2NT_THREADS")
    cores = numba.config.NUMBA_NUM_THREADS
    return max(1, min(int(env), cores)) if env else cores


def train_sgns(corpus, cfg: SgnsConfig = SgnsConfig(), n_nodes: int | None = None,
               ids=None) -> Embedding:
    """Skip-gram with negative sampling over a walk corpus.

    Each (center, context) pair within ``window`` positions is one SGD step;
    negatives come from the corpus unigram distribution raised to 3/4.  The
    learning rate decays linearly from ``lr_init`` to ``lr_init / 100``.
    Returns the input vectors; ``meta["epoch_loss"]`` holds the mean
    negative-sampling loss per epoch.
    """
    tokens, offsets = _flatten(corpus)
    if tokens.size == 0:
        raise ValueError("empty corpus")
    if tokens.min() < 0:
        raise ValueError("corpus contains negative node IDs")
    n = int(tokens.max()) + 1 if n_nodes is None else n_nodes
    if tokens.max() >= n:
        raise ValueError(f"corpus node ID {tokens.max()} out of range for n={n}")
    counts = np.bincount(tokens, minlength=n).astype(float)
    noise = counts ** 0.75
    cdf = np.cumsum(noise / noise.sum())
    cdf[-1] = 1.0
    rng = np.random.default_rng(cfg.seed)
    w_in = (rng.random((n, cfg.d)) - 0.5) / cfg.d
    w_out = np.zeros((n, cfg.d))
    args = (tokens, offsets, w_in, w_out, cdf, cfg.window, cfg.negatives, cfg.epochs,
            cfg.lr_init, cfg.lr_init / 100.0, cfg.seed)
    if cfg.parallel:
        numba.set_num_threads(worker_threads())
        losses = _train_hogwild(*args)
    else:
        losses = _train_serial(*args)
    meta = {
        "backend": "walk",
        "d": cfg.d,
        "window": cfg.window,
        "negatives": cfg.negatives,
        "epochs": cfg.epochs,
        "lr_init": cfg.lr_init,
        "seed": cfg.seed,
        "parallel": cfg.parallel,
        "epoch_loss": losses.tolist(),
        "score": "dot",
    }
    return Embedding(w_in, tuple(ids) if ids is not None else tuple(range(n)), meta)


def embed_walk(q: SymMatrix, wcfg: WalkConfig = WalkConfig(), scfg: SgnsConfig = SgnsConfig(),
               ids=None) -> Embedding:
    """Walks biased by ``Q`` followed by SGNS; nodes with an all-zero row get zero vectors."""
    table = build_transition(q)
    walks = generate_walks(q, wcfg, table)
    ids = tuple(ids) if ids is not None else tuple(range(q.n))
    if walks.shape[0] == 0:
        mat = np.zeros((q.n, scfg.d))
        meta = {"backend": "walk", "d": scfg.d, "dead_nodes": q.n, "epoch_loss": []}
        return Embedding(mat, ids, meta)
    emb = train_sgns(walks, scfg, n_nodes=q.n, ids=ids)
    mat = emb.matrix.copy()
    mat[table.dead] = 0.0
    meta = dict(emb.meta)
    meta.update(walks_per_node=wcfg.walks_per_node, walk_length=wcfg.walk_length,
                walk_seed=wcfg.seed, dead_nodes=int(table.dead.sum()))
    return Embedding(mat, ids, meta)
