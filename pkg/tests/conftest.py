"""Shared fixtures: small hand-built graphs with known metric values."""

import numpy as np
import pytest

from edgeentropy import LabeledGraph


def undirected_graph(num_nodes, pairs, labels, **kwargs):
    """Build a graph from undirected node pairs (mirrored on load)."""
    return LabeledGraph.from_edges(
        num_nodes, list(pairs), labels, directed=False, **kwargs
    )


def clique_pairs(nodes):
    nodes = list(nodes)
    return [
        (nodes[i], nodes[j])
        for i in range(len(nodes))
        for j in range(i + 1, len(nodes))
    ]


@pytest.fixture
def two_cliques_graph():
    """Two disjoint single-class 4-cliques: structure determines labels.

    Interclass matrix is the identity, entropy 0, intra-class ratio 1.
    """
    pairs = clique_pairs(range(4)) + clique_pairs(range(4, 8))
    return undirected_graph(8, pairs, [0] * 4 + [1] * 4)


@pytest.fixture
def paired_mixing_graph():
    """Every node has one same-class and one cross-class edge.

    Both interclass rows are exactly [0.5, 0.5], so entropy is exactly 1.
    """
    within = [(0, 1), (2, 3), (4, 5), (6, 7)]
    across = [(0, 4), (1, 5), (2, 6), (3, 7)]
    return undirected_graph(8, within + across, [0] * 4 + [1] * 4)


@pytest.fixture
def bipartite_graph():
    """Complete bipartite graph between the two classes.

    Edges always cross classes: intra-class ratio 0, entropy 0 (each row
    is a basis vector).
    """
    pairs = [(i, j) for i in range(4) for j in range(4, 8)]
    return undirected_graph(8, pairs, [0] * 4 + [1] * 4)


@pytest.fixture
def mixed_clique_graph():
    """Single 6-clique with two 3-node classes.

    Clustering coefficient 1; each interclass row is [2/5, 3/5], giving
    per-class entropy 0.97095 and the same dataset entropy.
    """
    return undirected_graph(6, clique_pairs(range(6)), [0, 0, 0, 1, 1, 1])


def random_labeled_graph(rng, max_nodes=50, num_classes=None, p=0.15,
                         self_loops=True, features=False):
    """Random directed graph for oracle comparisons."""
    n = int(rng.integers(2, max_nodes + 1))
    m = int(num_classes or rng.integers(1, 4))
    labels = rng.integers(0, m, size=n)
    dense = rng.random((n, n)) < p
    if not self_loops:
        np.fill_diagonal(dense, False)
    src, dst = np.nonzero(dense)
    feats = rng.standard_normal((n, 3)) if features else None
    return LabeledGraph.from_edges(
        n,
        np.column_stack([src, dst]),
        labels,
        num_classes=m,
        features=feats,
        directed=True,
    )
