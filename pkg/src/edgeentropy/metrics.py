"""Label-structure metrics for labeled graphs.

The central quantity is edge entropy: the class-weighted average of
per-class entropies of the interclass connectivity distribution, normalized
to [0, 1] by using log base M. An entropy of 0 means edges fully determine
neighbor labels; 1 means edges carry no label information. The module also
computes two label-blind or partially-blind comparison metrics, the
intra-class ratio and the mean local clustering coefficient.

All edge tallies exclude self loops. Conventions:
  * 0 * log 0 = 0
  * a class with no outgoing edges has entropy 0 and an all-zero
    probability row, flagged invalid rather than raising
  * a one-class graph has entropy 0 (log base 1 is degenerate)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateGraphError
from .graph import LabeledGraph

_PROB_ATOL = 1e-12


@dataclass(frozen=True)
class ConnectivityMatrix:
    """Interclass edge counts and their row-normalized probabilities.

    ``counts[l, m]`` is the number of non-self-loop directed edges from a
    class-l node to a class-m node. ``probs`` holds the row-normalized
    counts; rows of classes with zero outgoing edges are all zero and
    flagged False in ``row_valid``.
    """

    counts: np.ndarray
    probs: np.ndarray
    row_valid: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.counts.shape[0]

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> "ConnectivityMatrix":
        counts = np.asarray(counts, dtype=np.int64)
        row_sums = counts.sum(axis=1)
        row_valid = row_sums > 0
        probs = np.zeros(counts.shape, dtype=np.float64)
        probs[row_valid] = counts[row_valid] / row_sums[row_valid, None]
        return cls(counts=counts, probs=probs, row_valid=row_valid)

    @classmethod
    def from_probs(cls, probs: np.ndarray) -> "ConnectivityMatrix":
        """Wrap an already-normalized probability matrix (counts unknown)."""
        probs = np.asarray(probs, dtype=np.float64)
        row_sums = probs.sum(axis=1)
        row_valid = row_sums > 0
        if np.any(np.abs(row_sums[row_valid] - 1.0) > 1e-9):
            raise ValueError("probability rows must sum to 1")
        return cls(
            counts=np.zeros(probs.shape, dtype=np.int64),
            probs=probs,
            row_valid=row_valid,
        )


def connectivity(g: LabeledGraph) -> ConnectivityMatrix:
    """Tally interclass connectivity over directed non-self-loop edges."""
    m = g.num_classes
    src = g.edge_sources()
    dst = g.indices
    keep = src != dst
    pair_ids = g.labels[src[keep]] * m + g.labels[dst[keep]]
    counts = np.bincount(pair_ids, minlength=m * m).reshape(m, m)
    return ConnectivityMatrix.from_counts(counts)


def _row_entropy(row: np.ndarray, num_classes: int) -> float:
    """Entropy of one probability row in log base ``num_classes``."""
    if num_classes <= 1:
        return 0.0
    p = row[row > 0]
    if len(p) == 0:
        return 0.0
    return float(-(p * (np.log(p) / np.log(num_classes))).sum())


def per_class_entropy(conn: ConnectivityMatrix, class_index: int) -> float:
    """Entropy of one class's neighbor-label distribution, in [0, 1]."""
    m = conn.num_classes
    if not 0 <= class_index < m:
        raise IndexError(f"class index {class_index} outside [0, {m})")
    if not conn.row_valid[class_index]:
        return 0.0
    return _row_entropy(conn.probs[class_index], m)


def dataset_entropy(probs: np.ndarray, class_weights: np.ndarray) -> float:
    """Weighted edge entropy computed directly from a probability matrix.

    This is the analytic path used to check a target matrix before any
    graph is realized from it.
    """
    probs = np.asarray(probs, dtype=np.float64)
    class_weights = np.asarray(class_weights, dtype=np.float64)
    m = probs.shape[0]
    per_class = np.array([_row_entropy(probs[l], m) for l in range(m)])
    return float((per_class * class_weights).sum())


@dataclass(frozen=True)
class EntropyReport:
    """Edge entropy with the comparison metrics, all in [0, 1]."""

    per_class: np.ndarray
    class_weights: np.ndarray
    edge_entropy: float
    intra_class_ratio: float
    clustering_coefficient: float

    def to_dict(self) -> dict:
        return {
            "edge_entropy": self.edge_entropy,
            "per_class": [float(x) for x in self.per_class],
            "class_weights": [float(x) for x in self.class_weights],
            "intra_class_ratio": self.intra_class_ratio,
            "clustering_coefficient": self.clustering_coefficient,
        }


def edge_entropy(g: LabeledGraph) -> EntropyReport:
    """Full entropy report for a graph.

    Class weights are node fractions over all N nodes, isolated ones
    included. On a graph with no non-self-loop edges the intra-class ratio
    field is reported as 0 (certainty by absence, matching the empty-row
    entropy convention) instead of raising.
    """
    conn = connectivity(g)
    m = g.num_classes
    per_class = np.array([per_class_entropy(conn, l) for l in range(m)])
    counts = np.bincount(g.labels, minlength=m)
    weights = counts / g.num_nodes if g.num_nodes else np.zeros(m)
    total = float((per_class * weights).sum())
    try:
        intra = intra_class_ratio(g)
    except DegenerateGraphError:
        intra = 0.0
    return EntropyReport(
        per_class=per_class,
        class_weights=weights,
        edge_entropy=total,
        intra_class_ratio=intra,
        clustering_coefficient=clustering_coefficient(g),
    )


def intra_class_ratio(g: LabeledGraph) -> float:
    """Fraction of non-self-loop directed edges joining same-class nodes."""
    src = g.edge_sources()
    dst = g.indices
    keep = src != dst
    total = int(keep.sum())
    if total == 0:
        raise DegenerateGraphError("graph has no non-self-loop edges")
    same = int((g.labels[src[keep]] == g.labels[dst[keep]]).sum())
    return same / total


def _undirected_simple_adjacency(g: LabeledGraph) -> sp.csr_matrix:
    """Symmetrized 0/1 adjacency with self loops removed."""
    n = g.num_nodes
    src = g.edge_sources()
    dst = g.indices
    keep = src != dst
    src, dst = src[keep], dst[keep]
    rows = np.concatenate([src, dst])
    cols = np.concatenate([dst, src])
    a = sp.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n)
    )
    a.data[:] = 1  # mirrored duplicates were summed during conversion
    return a

# Above ~this many nodes the dense triangle product would not fit in memory.
_DENSE_TRIANGLE_LIMIT = 4096


def clustering_coefficient(g: LabeledGraph) -> float:
    """Mean local clustering coefficient over all nodes.

    The graph is symmetrized and self loops dropped. For a node with
    undirected degree d >= 2 the local coefficient is triangles / (d(d-1)/2);
    lower-degree nodes contribute 0. This is the mean-local (small-world)
    definition; the global transitivity variant is not computed.
    """
    n = g.num_nodes
    if n == 0:
        return 0.0
    a = _undirected_simple_adjacency(g)
    deg = np.asarray(a.sum(axis=1)).ravel().astype(np.int64)
    if n <= _DENSE_TRIANGLE_LIMIT:
        # Triangle counts are small integers, exact in float32.
        dense = a.toarray().astype(np.float32)
        paths2 = dense @ dense
        tri2 = (paths2 * dense).sum(axis=1)  # 2 * triangles per node
    else:
        paths2 = a @ a
        tri2 = np.asarray(paths2.multiply(a).sum(axis=1)).ravel()
    coeffs = np.zeros(n, dtype=np.float64)
    eligible = deg >= 2
    denom = deg[eligible] * (deg[eligible] - 1)
    coeffs[eligible] = tri2[eligible] / denom
    return float(coeffs.mean())
