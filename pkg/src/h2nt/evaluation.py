"""Motif-prediction and node-classification protocols."""

from __future__ import annotations

import csv
import io
import json
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .embedding import Embedding, pair_scores
from .graph import Graph
from .motif import enumerate_triangles
from .pipeline import EmbedConfig, embed_graph


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class MotifEvalSpec:
    n_test_triangles: int
    negative_ratio: int = 10
    n_p_max: int | None = None  # defaults to n_test_triangles
    seed: int = 0

    def __post_init__(self):
        if self.n_test_triangles < 1:
            raise ValueError("n_test_triangles must be >= 1")
        if self.negative_ratio < 1:
            raise ValueError("negative_ratio must be >= 1")
        if self.n_p_max is not None and self.n_p_max < 1:
            raise ValueError("n_p_max must be >= 1")

    @property
    def top_n(self) -> int:
        return self.n_p_max if self.n_p_max is not None else self.n_test_triangles


@dataclass
class EvalReport:
    precision_curve: list[float] = field(default_factory=list)
    mean_precision: float | None = None
    accuracy: float | None = None
    accuracies: list[float] = field(default_factory=list)
    repeat_means: list[float] = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("timing")
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls(**json.loads(text))

    def to_csv(self) -> str:
        """Flat table, one row per ``N`` of the precision curve."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "precision"])
        for k, v in enumerate(self.precision_curve, start=1):
            w.writerow([k, repr(float(v))])
        return buf.getvalue()


def _sorted_triple(a, b, c) -> tuple[int, int, int]:
    return tuple(sorted((int(a), int(b), int(c))))


def split_motif_testset(g: Graph, spec: MotifEvalSpec, seed=None):
    """Hold out ``n_test_triangles`` triangles and delete all their edges.

    Returns ``(train_graph, positives)`` with positives as a ``(k, 3)`` array.
    The training graph keeps every node so embeddings stay aligned.
    """
    tris = enumerate_triangles(g)
    k = spec.n_test_triangles
    if len(tris) < k:
        raise ValueError(f"requested {k} test triangles but the graph has only {len(tris)}")
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    pick = np.sort(rng.choice(len(tris), size=k, replace=False))
    positives = np.array([tris[i] for i in pick], dtype=np.int64).reshape(k, 3)
    removed = set()
    for a, b, c in positives:
        removed.update({(a, b), (a, c), (b, c)})
    return g.without_edges(removed), positives


def sample_negative_triples(g: Graph, count: int, seed=0) -> np.ndarray:
    """``count`` distinct node triples none of which is a triangle of ``g``.

    Rejection sampling, giving up after ``1000 * count`` draws.
    """
    if g.n < 3:
        raise SamplingError("need at least 3 nodes to sample triples")
    rng = np.random.default_rng(seed)
    cap = 1000 * count
    seen: set[tuple[int, int, int]] = set()
    out: list[tuple[int, int, int]] = []
    attempts = 0
    while len(out) < count:
        batch = min(max(64, 2 * (count - len(out))), cap - attempts)
        if batch <= 0:
            raise SamplingError(
                f"found only {len(out)}/{count} non-triangle triples in {cap} attempts"
            )
        for a, b, c in rng.integers(0, g.n, size=(batch, 3)):
            attempts += 1
            if a == b or a == c or b == c:
                continue
            t = _sorted_triple(a, b, c)
            if t in seen:
                continue
            if g.has_edge(t[0], t[1]) and g.has_edge(t[0], t[2]) and g.has_edge(t[1], t[2]):
                continue
            seen.add(t)
            out.append(t)
            if len(out) == count:
                break
    return np.array(out, dtype=np.int64).reshape(count, 3)


def score_triples(emb: Embedding, triples) -> np.ndarray:
    """Mean pairwise score over the three node pairs of each triple."""
    t = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    s = (pair_scores(emb, t[:, 0], t[:, 1]) + pair_scores(emb, t[:, 0], t[:, 2])
         + pair_scores(emb, t[:, 1], t[:, 2]))
    return s / 3.0


def precision_at(scores_pos, scores_neg, n_p_max: int) -> tuple[list[float], float]:
    """Precision@N for N = 1..n_p_max over the mixed descending ranking.

    Ties keep insertion order, positives first.
    """
    pos = np.asarray(scores_pos, dtype=float)
    neg = np.asarray(scores_neg, dtype=float)
    total = pos.size + neg.size
    if not 1 <= n_p_max <= total:
        raise ValueError(f"n_p_max must be in [1, {total}], got {n_p_max}")
    scores = np.concatenate([pos, neg])
    truth = np.concatenate([np.ones(pos.size), np.zeros(neg.size)])
    order = np.argsort(-scores, kind="stable")
    hits = np.cumsum(truth[order][:n_p_max])
    curve = hits / np.arange(1, n_p_max + 1)
    return curve.tolist(), float(curve.mean())


def null_precision(n_pos: int, n_neg: int, n_p_max: int, trials: int = 200, seed=0) -> float:
    """Mean precision of uniformly random scores (the chance baseline)."""
    rng = np.random.default_rng(seed)
    means = [precision_at(rng.random(n_pos), rng.random(n_neg), n_p_max)[1] for _ in range(trials)]
    return float(np.mean(means))


def run_motif_eval(g: Graph, cfg: EmbedConfig, spec: MotifEvalSpec, repeats: int = 5) -> EvalReport:
    """Split, embed the training graph, score held-out vs. negative triples; average repeats."""
    curves, means = [], []
    timing = {"split": 0.0, "transform": 0.0, "embed": 0.0, "score": 0.0}
    n_neg = spec.negative_ratio * spec.n_test_triangles
    for rep in range(repeats):
        t0 = time.perf_counter()
        train, pos = split_motif_testset(g, spec, seed=[spec.seed, rep, 0])
        neg = sample_negative_triples(g, n_neg, seed=[spec.seed, rep, 1])
        timing["split"] += time.perf_counter() - t0
        emb, _, t = embed_graph(train, cfg)
        timing["transform"] += t["transform"]
        timing["embed"] += t["embed"]
        t0 = time.perf_counter()
        curve, mean = precision_at(score_triples(emb, pos), score_triples(emb, neg), spec.top_n)
        timing["score"] += time.perf_counter() - t0
        curves.append(curve)
        means.append(mean)
    curve = np.mean(np.array(curves), axis=0)
    return EvalReport(
        precision_curve=curve.tolist(),
        mean_precision=float(curve.mean()),
        repeat_means=means,
        timing=timing,
        config={"task": "motif", "repeats": repeats, "eval": asdict(spec), "n_negatives": n_neg,
                **cfg.echo()},
    )


# --- classification -------------------------------------------------------


def logistic_loss(w, b, X, y, l2):
    """Mean L2-regularised logistic loss and its gradient ``(loss, dw, db)``.

    ``J = (1/n) [ sum_i log(1 + exp(-s_i z_i)) + l2/2 ||w||^2 ]`` with labels
    ``y in {0, 1}``, ``s = 2y - 1`` and an unpenalised bias ``b``.
    """
    n = X.shape[0]
    z = X @ w + b
    s = 2.0 * y - 1.0
    loss = (np.logaddexp(0.0, -s * z).sum() + 0.5 * l2 * (w @ w)) / n
    # d/dz log(1 + exp(-s z)) = sigmoid(z) - y
    r = 0.5 * (1.0 + np.tanh(0.5 * z)) - y
    dw = (X.T @ r + l2 * w) / n
    db = r.sum() / n
    return loss, dw, db


def fit_logistic(X, y, l2: float = 1.0, max_iter: int = 500, tol: float = 1e-6):
    """Full-batch gradient descent with the fixed step ``1 / L``.

    ``L`` bounds the Hessian, so every step is a descent step.
    Returns ``(w, b, losses)``.
    """
    n, d = X.shape
    sigma = np.linalg.norm(np.hstack([X, np.ones((n, 1))]), 2)
    lip = (0.25 * sigma ** 2 + l2) / n
    step = 1.0 / lip
    w = np.zeros(d)
    b = 0.0
    losses = []
    for _ in range(max_iter):
        loss, dw, db = logistic_loss(w, b, X, y, l2)
        losses.append(loss)
        if np.sqrt(dw @ dw + db * db) < tol:
            break
        w = w - step * dw
        b = b - step * db
    losses.append(logistic_loss(w, b, X, y, l2)[0])
    return w, b, losses


def fit_one_vs_all(X, y, l2: float = 1.0, max_iter: int = 500, tol: float = 1e-6):
    classes = np.unique(y)
    W = np.zeros((X.shape[1], classes.size))
    B = np.zeros(classes.size)
    for k, c in enumerate(classes):
        W[:, k], B[k], _ = fit_logistic(X, (y == c).astype(float), l2, max_iter, tol)
    return classes, W, B


def classify_nodes(emb: Embedding, labels, train_ratio: float, l2: float = 1.0, seed=0,
                   standardize: bool = True, max_iter: int = 500, tol: float = 1e-6) -> float:
    """Held-out accuracy of one-vs-all logistic regression on a uniform random split."""
    labels = np.asarray(labels)
    if labels.shape[0] != emb.n:
        raise ValueError(f"{labels.shape[0]} labels for {emb.n} nodes")
    if not 0 < train_ratio < 1:
        raise ValueError("train_ratio must lie strictly between 0 and 1")
    n = emb.n
    n_train = min(max(1, int(round(train_ratio * n))), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    tr, te = perm[:n_train], perm[n_train:]
    X = emb.matrix
    if standardize:
        mu = X[tr].mean(axis=0)
        sd = X[tr].std(axis=0)
        sd[sd == 0] = 1.0
        X = (X - mu) / sd
    absent = np.setdiff1d(np.unique(labels), labels[tr])
    if absent.size:
        warnings.warn(f"classes {absent.tolist()} missing from the training split; "
                      "they cannot be predicted", stacklevel=2)
    classes, W, B = fit_one_vs_all(X[tr], labels[tr], l2, max_iter, tol)
    pred = classes[np.argmax(X[te] @ W + B, axis=1)]
    return float(np.mean(pred == labels[te]))


def run_classification(emb: Embedding, labels, train_ratio: float, repeats: int = 10,
                       l2: float = 1.0, seed: int = 0, config: dict | None = None) -> EvalReport:
    t0 = time.perf_counter()
    accs = [classify_nodes(emb, labels, train_ratio, l2, seed=[seed, rep]) for rep in range(repeats)]
    return EvalReport(
        accuracy=float(np.mean(accs)),
        accuracies=accs,
        timing={"classify": time.perf_counter() - t0},
        config={"task": "classify", "train_ratio": train_ratio, "repeats": repeats, "l2": l2,
                "seed": seed, **(config or {})},
    )
