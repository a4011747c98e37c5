"""Arbitrary-order proximity embedding by eigen-reweighting.

Instead of forming ``P = w_1 Q + ... + w_l Q^l`` explicitly, the top-|lambda|
eigenpairs of ``Q`` are computed once and the polynomial is applied to the
retained eigenvalues, so ``P`` restricted to that eigenspace is
``U diag(F(lambda)) U^T``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .embedding import Embedding
from .graph import SymMatrix


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (achieved residual {residual:.3e})")


def default_dim(n: int) -> int:
    return 16 if n < 2000 else 128


def default_weights(order: int) -> tuple[float, ...]:
    return tuple(0.1 ** i for i in range(1, order + 1))


@dataclass(frozen=True)
class SpectralConfig:
    d: int | None = None
    order: int = 3
    weights: tuple[float, ...] | None = None
    eig_tol: float = 1e-8
    max_iter: int = 1000
    seed: int = 0
    # "signed" reconstructs sum_k F(lambda_k) u_k[i] u_k[j]; "dot" ignores the signs
    score: str = "signed"

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.weights is None:
            object.__setattr__(self, "weights", default_weights(self.order))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != self.order:
            raise ValueError(f"need {self.order} weights, got {len(self.weights)}")
        if not any(self.weights):
            raise ValueError("at least one proximity weight must be nonzero")
        if self.d is not None and self.d < 1:
            raise ValueError("d must be >= 1")
        if self.score not in ("signed", "dot"):
            raise ValueError("score must be 'signed' or 'dot'")

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        big = np.flatnonzero(np.abs(col) > 1e-10 * max(np.abs(col).max(), 1e-300))
        if big.size and col[big[0]] < 0:
            vecs[:, k] = -col
    return vecs


def _order(values: np.ndarray) -> np.ndarray:
    # largest magnitude first; positive before negative on ties
    return np.lexsort((-values, -np.abs(values)))


def residuals(mat, values, vecs) -> np.ndarray:
    a = mat.to_csr() if isinstance(mat, SymMatrix) else mat
    return np.linalg.norm(a @ vecs - vecs * values, axis=0)


def top_eigenpairs(mat: SymMatrix, d: int, tol: float = 1e-8, max_iter: int = 1000,
                   seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """The ``d`` eigenpairs of largest ``|lambda|`` of a symmetric matrix.

    Uses implicitly restarted Lanczos (ARPACK) from a seeded start vector;
    when ``d`` reaches ``n - 1`` the problem is solved densely instead.
    Every pair satisfies ``||A u - lambda u|| <= tol * max(1, |lambda|)``
    or ``ConvergenceError`` is raised.
    """
    n = mat.n
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    a = mat.to_csr()
    if a.nnz == 0:
        return np.zeros(d), np.eye(n)[:, :d]
    if d >= n - 1:
        values, vecs = scipy.linalg.eigh(a.toarray())
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            values, vecs = spla.eigsh(a, k=d, which="LM", v0=v0, tol=tol / 10,
                                      maxiter=max_iter)
        except spla.ArpackNoConvergence as exc:
            got = exc.eigenvectors.shape[1] if exc.eigenvectors is not None else 0
            res = residuals(a, exc.eigenvalues, exc.eigenvectors) if got else np.array([np.inf])
            raise ConvergenceError(
                f"Lanczos found {got}/{d} eigenpairs within {max_iter} iterations",
                float(res.max()),
            ) from exc
    idx = _order(values)[:d]
    values, vecs = values[idx], vecs[:, idx]
    vecs = _fix_signs(vecs)
    res = residuals(a, values, vecs)
    bound = tol * np.maximum(1.0, np.abs(values))
    if np.any(res > bound):
        worst = int(np.argmax(res / bound))
        raise ConvergenceError(f"eigenpair {worst} above tolerance", float(res[worst]))
    return values, vecs


def reweight(values, weights) -> np.ndarray:
    """``F(lambda) = sum_i w_i lambda^i`` applied elementwise."""
    values = np.asarray(values, dtype=float)
    out = np.zeros_like(values)
    power = np.ones_like(values)
    for w in weights:
        power = power * values
        out = out + w * power
    return out


def embed_spectral(q: SymMatrix, cfg: SpectralConfig = SpectralConfig(), ids=None) -> Embedding:
    """Embedding with ``x_ik = u_k[i] sqrt(|F(lambda_k)|)``; ``sign(F)`` goes to meta."""
    n = q.n
    d = min(cfg.d if cfg.d is not None else default_dim(n), n)
    values, vecs = top_eigenpairs(q, d, cfg.eig_tol, cfg.max_iter, cfg.seed)
    f = reweight(values, cfg.weights)
    x = vecs * np.sqrt(np.abs(f))
    dead = q.row_sums() == 0
    x[dead] = 0.0
    meta = {
        "backend": "spectral",
        "order": cfg.order,
        "weights": list(cfg.weights),
        "d": d,
        "eigenvalues": values.tolist(),
        "reweighted": f.tolist(),
        "signs": np.where(f < 0, -1.0, 1.0).tolist(),
        "score": cfg.score,
        "seed": cfg.seed,
        "dead_nodes": int(dead.sum()),
        "config_hash": cfg.digest(),
    }
    return Embedding(x, tuple(ids) if ids is not None else tuple(range(n)), meta)
