import numpy as np
import pytest

from edgeentropy import (
    ConnectivityMatrix,
    DegenerateGraphError,
    LabeledGraph,
    clustering_coefficient,
    connectivity,
    dataset_entropy,
    edge_entropy,
    intra_class_ratio,
    per_class_entropy,
)
from edgeentropy.generate import P_HIGH, P_LOW

from conftest import clique_pairs, random_labeled_graph, undirected_graph
from helpers import naive_connectivity_counts

# Entropies frozen from an independent hand computation of
# H(row) = -sum_m p_m log_M p_m.
TWO_CLASS_9604 = 0.24229218908241482
P_LOW_ROWS = (0.5578578164321781, 0.3589962496465303, 0.6448036321632044)
P_LOW_DATASET = 0.5205525660806376
P_HIGH_ROWS = (0.9862903749247764, 0.9372305632161295, 0.9983492291215557)
P_HIGH_DATASET = 0.9739567224208207
MIX_2_3 = 0.9709505944546686
MIX_1_2 = 0.9182958340544896


# -- connectivity ---------------------------------------------------------


def test_two_cliques_connectivity_identity(two_cliques_graph):
    conn = connectivity(two_cliques_graph)
    assert np.array_equal(conn.probs, np.eye(2))
    assert conn.row_valid.all()
    assert np.array_equal(conn.counts, 12 * np.eye(2, dtype=np.int64))


def test_bipartite_connectivity_swaps(bipartite_graph):
    conn = connectivity(bipartite_graph)
    assert np.array_equal(conn.probs, [[0.0, 1.0], [1.0, 0.0]])


def test_zero_out_degree_class_flagged():
    g = LabeledGraph.from_edges(3, [(0, 1), (1, 0)], [0, 0, 1], num_classes=2)
    conn = connectivity(g)
    assert conn.row_valid[0]
    assert not conn.row_valid[1]
    assert np.array_equal(conn.probs[1], [0.0, 0.0])


def test_self_loops_excluded_from_counts():
    g = LabeledGraph.from_edges(2, [(0, 0), (0, 1), (1, 1)], [0, 1])
    conn = connectivity(g)
    assert conn.counts.sum() == 1
    assert conn.counts[0, 1] == 1


def test_valid_rows_sum_to_one():
    rng = np.random.default_rng(2)
    for _ in range(30):
        g = random_labeled_graph(rng)
        conn = connectivity(g)
        sums = conn.probs.sum(axis=1)
        assert np.all(np.abs(sums[conn.row_valid] - 1.0) < 1e-12)
        assert np.all(sums[~conn.row_valid] == 0.0)
        assert conn.probs.min() >= 0.0 and conn.probs.max() <= 1.0


def test_connectivity_matches_naive_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = random_labeled_graph(rng)
        assert np.array_equal(connectivity(g).counts, naive_connectivity_counts(g))


def test_from_probs_rejects_unnormalized():
    with pytest.raises(ValueError):
        ConnectivityMatrix.from_probs([[0.6, 0.6], [0.5, 0.5]])


# -- per-class entropy ----------------------------------------------------


def test_row_96_04():
    conn = ConnectivityMatrix.from_counts([[96, 4], [4, 96]])
    assert per_class_entropy(conn, 0) == pytest.approx(TWO_CLASS_9604, abs=1e-12)
    assert per_class_entropy(conn, 0) == pytest.approx(0.2423, abs=1e-4)


def test_basis_row_is_zero():
    conn = ConnectivityMatrix.from_counts([[7, 0, 0], [1, 1, 1], [0, 0, 5]])
    assert per_class_entropy(conn, 0) == 0.0
    assert per_class_entropy(conn, 2) == 0.0


def test_uniform_row_is_one():
    for m in (2, 3, 5):
        conn = ConnectivityMatrix.from_counts(np.full((m, m), 4))
        for l in range(m):
            assert per_class_entropy(conn, l) == pytest.approx(1.0, abs=1e-12)


def test_invalid_row_entropy_zero():
    conn = ConnectivityMatrix.from_counts([[0, 0], [3, 3]])
    assert per_class_entropy(conn, 0) == 0.0


def test_out_of_range_class_raises():
    conn = ConnectivityMatrix.from_counts([[1, 1], [1, 1]])
    with pytest.raises(IndexError):
        per_class_entropy(conn, 2)
    with pytest.raises(IndexError):
        per_class_entropy(conn, -1)


def test_one_class_graph_entropy_zero():
    conn = ConnectivityMatrix.from_counts([[5]])
    assert per_class_entropy(conn, 0) == 0.0


# -- dataset entropy ------------------------------------------------------


def test_dataset_entropy_p_low():
    w = np.full(3, 1 / 3)
    val = dataset_entropy(P_LOW, w)
    assert val == pytest.approx(P_LOW_DATASET, abs=1e-12)
    assert val == pytest.approx(0.52, abs=5e-3)


def test_dataset_entropy_p_high():
    w = np.full(3, 1 / 3)
    val = dataset_entropy(P_HIGH, w)
    assert val == pytest.approx(P_HIGH_DATASET, abs=1e-12)
    assert val == pytest.approx(0.974, abs=1e-3)


def test_dataset_entropy_weights_matter():
    probs = [[1.0, 0.0], [0.5, 0.5]]
    assert dataset_entropy(probs, [1.0, 0.0]) == 0.0
    assert dataset_entropy(probs, [0.0, 1.0]) == pytest.approx(1.0)
    assert dataset_entropy(probs, [0.5, 0.5]) == pytest.approx(0.5)


# -- edge entropy on fixtures ---------------------------------------------


def test_two_cliques_entropy_zero(two_cliques_graph):
    rep = edge_entropy(two_cliques_graph)
    assert rep.edge_entropy == 0.0
    assert rep.intra_class_ratio == 1.0
    assert list(rep.class_weights) == [0.5, 0.5]


def test_bipartite_entropy_zero(bipartite_graph):
    rep = edge_entropy(bipartite_graph)
    assert rep.edge_entropy == 0.0
    assert rep.intra_class_ratio == 0.0


def test_paired_mixing_entropy_exactly_one(paired_mixing_graph):
    rep = edge_entropy(paired_mixing_graph)
    assert rep.edge_entropy == pytest.approx(1.0, abs=1e-12)
    assert rep.intra_class_ratio == 0.5


def test_mixed_clique_metrics(mixed_clique_graph):
    rep = edge_entropy(mixed_clique_graph)
    assert rep.edge_entropy == pytest.approx(MIX_2_3, abs=1e-12)
    assert rep.clustering_coefficient == 1.0
    # every node touches 2 same-class and 3 cross-class directed edges
    assert rep.intra_class_ratio == pytest.approx(2 / 5)


def test_unbalanced_mixed_clique():
    g = undirected_graph(4, clique_pairs(range(4)), [0, 0, 0, 1])
    rep = edge_entropy(g)
    # class 0 rows are [2/3, 1/3], class 1 row is [1, 0]
    expected = 0.75 * MIX_1_2 + 0.25 * 0.0
    assert rep.edge_entropy == pytest.approx(expected, abs=1e-12)


def test_isolated_nodes_still_weighted(two_cliques_graph):
    g = LabeledGraph.from_edges(
        10,
        two_cliques_graph.edge_array(),
        list(two_cliques_graph.labels) + [0, 1],
        num_classes=2,
    )
    rep = edge_entropy(g)
    assert list(rep.class_weights) == [0.5, 0.5]
    assert rep.edge_entropy == 0.0


def test_edge_entropy_weighted_sum_consistent():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g = random_labeled_graph(rng)
        rep = edge_entropy(g)
        assert rep.edge_entropy == pytest.approx(
            float((rep.per_class * rep.class_weights).sum()), abs=1e-15
        )
        assert 0.0 <= rep.edge_entropy <= 1.0
        assert np.all(rep.per_class >= 0.0) and np.all(rep.per_class <= 1.0)


def test_no_edge_graph_report_is_degenerate_zero():
    g = LabeledGraph.from_edges(3, [(0, 0)], [0, 1, 0], num_classes=2)
    rep = edge_entropy(g)
    assert rep.edge_entropy == 0.0
    assert rep.intra_class_ratio == 0.0
    assert rep.clustering_coefficient == 0.0


# -- invariance properties ------------------------------------------------


def permute_nodes(g, perm):
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    edges = g.edge_array()
    return LabeledGraph.from_edges(
        g.num_nodes,
        np.column_stack([perm[edges[:, 0]], perm[edges[:, 1]]]),
        g.labels[inv],
        num_classes=g.num_classes,
    )


def test_node_permutation_invariance():
    rng = np.random.default_rng(5)
    for _ in range(10):
        g = random_labeled_graph(rng, max_nodes=30)
        perm = rng.permutation(g.num_nodes)
        h = permute_nodes(g, perm)
        a, b = edge_entropy(g), edge_entropy(h)
        assert a.edge_entropy == pytest.approx(b.edge_entropy, abs=1e-12)
        assert a.intra_class_ratio == pytest.approx(b.intra_class_ratio, abs=1e-12)
        assert a.clustering_coefficient == pytest.approx(
            b.clustering_coefficient, abs=1e-12
        )


def test_class_permutation_equivariance():
    rng = np.random.default_rng(6)
    for _ in range(10):
        g = random_labeled_graph(rng, max_nodes=30, num_classes=3)
        perm = rng.permutation(3)
        h = LabeledGraph.from_edges(
            g.num_nodes, g.edge_array(), perm[g.labels], num_classes=3
        )
        ca, cb = connectivity(g), connectivity(h)
        assert np.array_equal(cb.counts[np.ix_(perm, perm)], ca.counts)
        ra, rb = edge_entropy(g), edge_entropy(h)
        assert rb.edge_entropy == pytest.approx(ra.edge_entropy, abs=1e-12)
        assert np.allclose(rb.per_class[perm], ra.per_class, atol=1e-12)


def test_adding_self_loops_changes_nothing():
    rng = np.random.default_rng(7)
    for _ in range(10):
        g = random_labeled_graph(rng, max_nodes=30, self_loops=False, p=0.3)
        loops = np.column_stack([np.arange(g.num_nodes)] * 2)
        h = LabeledGraph.from_edges(
            g.num_nodes,
            np.concatenate([g.edge_array(), loops]),
            g.labels,
            num_classes=g.num_classes,
        )
        a, b = edge_entropy(g), edge_entropy(h)
        assert b.edge_entropy == a.edge_entropy
        assert b.intra_class_ratio == a.intra_class_ratio
        assert b.clustering_coefficient == a.clustering_coefficient


def test_entropy_zero_iff_basis_rows():
    rng = np.random.default_rng(8)
    for _ in range(30):
        g = random_labeled_graph(rng, max_nodes=25, p=0.3)
        rep = edge_entropy(g)
        conn = connectivity(g)
        basis = all(
            (row.max() == 1.0) for row in conn.probs[conn.row_valid]
        ) if conn.row_valid.any() else True
        weighted_valid = conn.row_valid & (rep.class_weights > 0)
        if not weighted_valid.any():
            assert rep.edge_entropy == 0.0
        elif basis:
            assert rep.edge_entropy == 0.0
        else:
            assert rep.edge_entropy > 0.0


def test_entropy_one_iff_uniform_rows(paired_mixing_graph):
    rep = edge_entropy(paired_mixing_graph)
    assert rep.edge_entropy == pytest.approx(1.0, abs=1e-12)
    conn = connectivity(paired_mixing_graph)
    assert np.allclose(conn.probs, 0.5)
    # disturb uniformity: entropy must drop strictly below 1
    g = LabeledGraph.from_edges(
        paired_mixing_graph.num_nodes,
        np.concatenate([paired_mixing_graph.edge_array(), [[0, 2], [2, 0]]]),
        paired_mixing_graph.labels,
        num_classes=2,
    )
    assert edge_entropy(g).edge_entropy < 1.0


# -- intra-class ratio ----------------------------------------------------


def test_intra_ratio_no_edges_raises():
    g = LabeledGraph.from_edges(2, [(0, 0)], [0, 1], num_classes=2)
    with pytest.raises(DegenerateGraphError):
        intra_class_ratio(g)


def test_intra_ratio_mixed_counts():
    g = LabeledGraph.from_edges(
        4, [(0, 1), (0, 2), (0, 3), (1, 0)], [0, 0, 1, 1]
    )
    assert intra_class_ratio(g) == pytest.approx(0.5)


# -- clustering coefficient -----------------------------------------------


def test_clustering_four_clique():
    g = undirected_graph(4, clique_pairs(range(4)), [0] * 4)
    assert clustering_coefficient(g) == 1.0


def test_clustering_five_star():
    g = undirected_graph(5, [(0, i) for i in range(1, 5)], [0] * 5)
    assert clustering_coefficient(g) == 0.0


def test_clustering_triangle_plus_isolated():
    g = LabeledGraph.from_edges(
        4, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)], [0] * 4
    )
    assert clustering_coefficient(g) == pytest.approx(0.75)


def test_clustering_triangle_plus_pendant():
    # triangle 0-1-2 with pendant 3 on node 0: (1/3 + 1 + 1 + 0) / 4
    g = undirected_graph(4, [(0, 1), (1, 2), (0, 2), (0, 3)], [0] * 4)
    assert clustering_coefficient(g) == pytest.approx(7 / 12)


def test_clustering_directed_edges_symmetrized():
    # one-way triangle counts the same as a mutual one
    g = LabeledGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)], [0] * 3)
    assert clustering_coefficient(g) == 1.0


def test_clustering_empty_graph():
    g = LabeledGraph.from_edges(0, np.zeros((0, 2)), [], num_classes=1)
    assert clustering_coefficient(g) == 0.0
