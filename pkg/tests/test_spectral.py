import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph
from h2nt.embedding import Embedding, pair_score, pair_scores
from h2nt.graph import PPMParams, SymMatrix, expected_ppm_matrix, sample_ppm
from h2nt.motif import TransformConfig, transform
from h2nt.spectral import (
    SpectralConfig,
    default_dim,
    embed_spectral,
    residuals,
    reweight,
    top_eigenpairs,
)


def jacobi_eigvals(a, sweeps=100, tol=1e-14):
    """Cyclic Jacobi rotations; independent of LAPACK and ARPACK."""
    a = np.array(a, dtype=float)
    n = len(a)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off < tol * max(1.0, np.abs(a).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1)) if theta else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
    return np.diag(a)


def _random_sym(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


def _top_by_magnitude(vals, d):
    vals = np.asarray(vals)
    return vals[np.lexsort((-vals, -np.abs(vals)))][:d]


def test_top_eigenpairs_diag():
    vals, vecs = top_eigenpairs(SymMatrix.from_dense(np.diag([3.0, 1.0])), 1)
    assert vals[0] == pytest.approx(3.0)
    np.testing.assert_allclose(vecs[:, 0], [1.0, 0.0], atol=1e-12)


def test_top_eigenpairs_all_ones():
    vals, _ = top_eigenpairs(SymMatrix.from_dense(np.ones((2, 2))), 2)
    np.testing.assert_allclose(sorted(vals), [0.0, 2.0], atol=1e-12)


def test_matches_jacobi_oracle():
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = _random_sym(rng, 20)
        expected = _top_by_magnitude(jacobi_eigvals(a), 6)
        vals, vecs = top_eigenpairs(SymMatrix.from_dense(a), 6)
        np.testing.assert_allclose(vals, expected, atol=1e-6)
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(6), atol=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.data())
def test_residual_bound_and_sign_convention(n, data):
    d = data.draw(st.integers(1, n))
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
    mat = SymMatrix.from_dense(_random_sym(rng, n))
    vals, vecs = top_eigenpairs(mat, d)
    assert np.all(residuals(mat, vals, vecs) <= 1e-8 * np.maximum(1, np.abs(vals)))
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(d), atol=1e-6)
    for k in range(d):
        col = vecs[:, k]
        assert col[np.flatnonzero(np.abs(col) > 1e-10)[0]] > 0
    assert np.all(np.diff(np.abs(vals)) <= 1e-9)


def test_top_eigenpairs_rejects_bad_d():
    with pytest.raises(ValueError):
        top_eigenpairs(SymMatrix.from_dense(np.eye(3)), 4)


def test_reweight_examples():
    np.testing.assert_allclose(reweight([2.0, -1.5], [1.0]), [2.0, -1.5])
    assert reweight([2.0], [0.1, 0.01])[0] == pytest.approx(0.24)
    assert reweight([0.0], [0.3, 0.2, 0.1])[0] == 0.0


def test_config_defaults_and_validation():
    cfg = SpectralConfig()
    assert cfg.weights == pytest.approx((0.1, 0.01, 0.001))
    assert default_dim(100) == 16 and default_dim(5000) == 128
    with pytest.raises(ValueError):
        SpectralConfig(order=2, weights=(1.0,))
    with pytest.raises(ValueError):
        SpectralConfig(order=2, weights=(0.0, 0.0))
    assert SpectralConfig(seed=1).digest() != cfg.digest()


def test_triangle_scores_symmetric(triangle):
    q = transform(triangle).q
    emb = embed_spectral(q, SpectralConfig(d=1, order=1, weights=(1.0,)))
    s = [pair_score(emb, 0, 1), pair_score(emb, 0, 2), pair_score(emb, 1, 2)]
    np.testing.assert_allclose(s, s[0], rtol=1e-10)


def test_full_rank_reconstruction():
    rng = np.random.default_rng(4)
    g = random_graph(rng, 20, 0.5)
    q = transform(g, TransformConfig(0.5)).q
    emb = embed_spectral(q, SpectralConfig(d=20, order=1, weights=(1.0,)))
    i, j = np.triu_indices(20, 1)
    np.testing.assert_allclose(pair_scores(emb, i, j), q.to_dense()[i, j], atol=1e-5)


def test_ppm_within_above_cross():
    params = PPMParams(20, 2, 0.6, 0.05)
    q = transform(sample_ppm(params, 3)).q
    emb = embed_spectral(q, SpectralConfig(d=4, order=3))
    lab = params.labels()
    i, j = np.triu_indices(params.n, 1)
    s = pair_scores(emb, i, j)
    same = lab[i] == lab[j]
    assert s[same].mean() > s[~same].mean()


def test_pair_score_edge_cases():
    emb = Embedding(np.array([[0.0, 0.0], [1.0, 2.0]]), (0, 1), {"signs": [1.0, 1.0]})
    assert pair_score(emb, 0, 1) == 0.0
    assert pair_score(emb, 1, 1) >= 0
    with pytest.raises(IndexError):
        pair_score(emb, 0, 2)
    with pytest.raises(IndexError):
        pair_scores(emb, [0], [5])
    signed = Embedding(np.array([[1.0, 1.0], [1.0, 1.0]]), (0, 1), {"signs": [1.0, -1.0]})
    assert pair_score(signed, 0, 1) == 0.0
    dot = Embedding(signed.matrix, (0, 1), {"signs": [1.0, -1.0], "score": "dot"})
    assert pair_score(dot, 0, 1) == 2.0


def test_dead_nodes_zero_rows():
    from h2nt.graph import Graph

    g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)])
    emb = embed_spectral(transform(g).q, SpectralConfig(d=2))
    assert not np.any(emb.matrix[3:])
    assert emb.meta["dead_nodes"] == 2


def test_deterministic():
    q = transform(sample_ppm(PPMParams(30, 3, 0.5, 0.05), 1), TransformConfig(0.3)).q
    a = embed_spectral(q, SpectralConfig(d=6))
    b = embed_spectral(q, SpectralConfig(d=6))
    assert a.matrix.tobytes() == b.matrix.tobytes()
    assert a.meta == b.meta


def test_meta_contents():
    q = transform(sample_ppm(PPMParams(10, 2, 0.8, 0.1), 0)).q
    meta = embed_spectral(q, SpectralConfig(d=3)).meta
    assert meta["backend"] == "spectral"
    assert meta["weights"] == pytest.approx([0.1, 0.01, 0.001])
    assert len(meta["signs"]) == 3
    np.testing.assert_allclose(meta["reweighted"], reweight(meta["eigenvalues"], meta["weights"]))


@pytest.mark.parametrize("l", range(1, 7))
def test_order_monotone_ranking(l):
    params = PPMParams(5, 3, 0.7, 0.2)
    mat = expected_ppm_matrix(params)
    weights = tuple([0.0] * (l - 1) + [1.0])
    emb = embed_spectral(mat, SpectralConfig(d=params.n, order=l, weights=weights))
    lab = params.labels()
    i, j = np.triu_indices(params.n, 1)
    s = pair_scores(emb, i, j)
    same = lab[i] == lab[j]
    assert s[same].min() > s[~same].max()
