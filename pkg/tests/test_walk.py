from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import graphs
from h2nt.graph import Graph, SymMatrix
from h2nt.motif import TransformConfig, transform
from h2nt.walk import (
    SgnsConfig,
    WalkConfig,
    build_alias,
    build_transition,
    embed_walk,
    generate_walks,
    save_walks,
    train_sgns,
)


def _cos(x, i, j):
    return x[i] @ x[j] / (np.linalg.norm(x[i]) * np.linalg.norm(x[j]))


def _weighted(n, edges):
    return SymMatrix.from_dense(Graph.from_edges(n, edges).adjacency().to_dense())


def test_alias_single_neighbor():
    table = build_transition(_weighted(2, [(0, 1, 3.0)]))
    assert table.probabilities(0) == {1: 1.0}
    rng = np.random.default_rng(0)
    assert set(table.draw(np.zeros(100, dtype=np.int64), rng.random(100), rng.random(100))) == {1}


def test_alias_monte_carlo():
    table = build_transition(_weighted(3, [(0, 1, 2.0), (0, 2, 1.0)]))
    assert table.probabilities(0) == pytest.approx({1: 2 / 3, 2: 1 / 3})
    rng = np.random.default_rng(1)
    n = 1_000_000
    out = table.draw(np.zeros(n, dtype=np.int64), rng.random(n), rng.random(n))
    assert abs(np.mean(out == 1) - 2 / 3) < 0.002
    assert abs(np.mean(out == 2) - 1 / 3) < 0.002


def test_alias_rejects_zero_weights():
    with pytest.raises(ValueError):
        build_alias([0.0, 0.0])


def test_dead_node_flag():
    table = build_transition(_weighted(3, [(0, 1, 1.0)]))
    assert table.dead.tolist() == [False, False, True]


@settings(max_examples=100, deadline=None)
@given(graphs(max_nodes=10))
def test_transition_rows_sum_to_one(g):
    rng = np.random.default_rng(len(g.edges))
    weighted = Graph(g.n, {e: float(rng.uniform(0.1, 3)) for e in g.edges})
    q = SymMatrix.from_dense(weighted.adjacency().to_dense())
    table = build_transition(q)
    dense = q.to_dense()
    for i in np.flatnonzero(~table.dead):
        probs = table.probabilities(int(i))
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
        for j, p in probs.items():
            assert p == pytest.approx(dense[i, j] / dense[i].sum(), abs=1e-12)


def test_forced_path_walk():
    walks = generate_walks(_weighted(2, [(0, 1, 1.0)]), WalkConfig(1, 4, seed=0))
    by_start = {int(w[0]): w.tolist() for w in walks}
    assert by_start[0] == [0, 1, 0, 1]
    assert by_start[1] == [1, 0, 1, 0]


def test_corpus_size_and_validity():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    g = Graph(7, g.edges)
    q = transform(g, TransformConfig(0.5)).q
    walks = generate_walks(q, WalkConfig(3, 12, seed=4))
    table = build_transition(q)
    assert walks.shape == (3 * int((~table.dead).sum()), 12)
    dense = q.to_dense()
    assert np.all(dense[walks[:, :-1], walks[:, 1:]] > 0)


def test_walks_deterministic_and_seeded(double_triangle):
    q = transform(double_triangle, TransformConfig(0.7)).q
    a = generate_walks(q, WalkConfig(5, 20, seed=9))
    assert a.tobytes() == generate_walks(q, WalkConfig(5, 20, seed=9)).tobytes()
    assert a.tobytes() != generate_walks(q, WalkConfig(5, 20, seed=10)).tobytes()


def test_lambda_downweights_shared_edge(double_triangle):
    q = transform(double_triangle, TransformConfig(1.7)).q
    # outer edges 1 + 1.7 * 1 = 2.7, shared edge 2 + 1.7 * 0 = 2
    walks = generate_walks(q, WalkConfig(25_000, 10, seed=0))
    a, b = walks[:, :-1].ravel(), walks[:, 1:].ravel()
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    counts = {e: int(np.sum((lo == e[0]) & (hi == e[1]))) for e in double_triangle.edges}
    shared = counts.pop((1, 2))
    assert walks.shape[0] >= 100_000
    assert shared < min(counts.values())


def test_save_walks_uses_external_ids():
    assert save_walks(np.array([[0, 1, 0]]), (7, 9)) == "7 9 7\n"


def test_sgns_cooccurring_pair_ranks_above_isolated():
    # "a b" repeated, with unrelated background traffic so the noise
    # distribution is not the pair itself
    rng = np.random.default_rng(0)
    pair = [[0, 1] * 5 for _ in range(200)]
    background = [list(rng.integers(3, 30, size=10)) for _ in range(400)]
    emb = train_sgns(pair + background, SgnsConfig(d=8, window=2, epochs=5, seed=0), n_nodes=30)
    x = emb.matrix
    assert _cos(x, 0, 1) > _cos(x, 0, 2)
    assert np.isfinite(x).all() and x.shape == (30, 8)


def test_sgns_rejects_empty_corpus():
    with pytest.raises(ValueError):
        train_sgns([], SgnsConfig())
    with pytest.raises(ValueError):
        train_sgns(np.zeros((0, 5), dtype=np.int64), SgnsConfig())


def test_sgns_loss_decreases(double_triangle):
    walks = generate_walks(transform(double_triangle).q, WalkConfig(20, 20, seed=1))
    emb = train_sgns(walks, SgnsConfig(d=4, epochs=5, seed=3))
    loss = emb.meta["epoch_loss"]
    assert len(loss) == 5 and loss[-1] < loss[0]


def test_embed_walk_triangle(triangle):
    emb = embed_walk(transform(triangle).q, WalkConfig(5, 10), SgnsConfig(d=6))
    assert emb.matrix.shape == (3, 6)
    assert np.isfinite(emb.matrix).all()


def test_embed_walk_dead_nodes_zero():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)])
    emb = embed_walk(transform(g).q, WalkConfig(4, 10), SgnsConfig(d=4))
    assert not np.any(emb.matrix[3:])
    assert np.any(emb.matrix[:3])
    assert emb.meta["dead_nodes"] == 2


def test_embed_walk_all_dead():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    emb = embed_walk(transform(g).q, WalkConfig(2, 5), SgnsConfig(d=3))
    assert emb.matrix.shape == (3, 3) and not np.any(emb.matrix)


def test_embed_walk_deterministic(double_triangle):
    q = transform(double_triangle, TransformConfig(0.3)).q
    a = embed_walk(q, WalkConfig(5, 10, seed=2), SgnsConfig(d=4, seed=2))
    b = embed_walk(q, WalkConfig(5, 10, seed=2), SgnsConfig(d=4, seed=2))
    assert a.matrix.tobytes() == b.matrix.tobytes()
    assert a.meta == b.meta


def test_parallel_mode_runs(double_triangle):
    q = transform(double_triangle).q
    emb = embed_walk(q, WalkConfig(5, 10), SgnsConfig(d=4, parallel=True))
    assert np.isfinite(emb.matrix).all()


def test_two_cliques_homophily():
    edges = list(combinations(range(10), 2)) + list(combinations(range(10, 20), 2)) + [(0, 10)]
    g = Graph.from_edges(20, edges)
    emb = embed_walk(transform(g).q, WalkConfig(10, 40, seed=0), SgnsConfig(d=16, seed=0))
    x = emb.matrix / np.linalg.norm(emb.matrix, axis=1, keepdims=True)
    c = x @ x.T
    lab = np.repeat([0, 1], 10)
    i, j = np.triu_indices(20, 1)
    same = lab[i] == lab[j]
    assert c[i, j][same].mean() > c[i, j][~same].mean()
