"""Labeled-graph data model and file IO.

A :class:`LabeledGraph` stores a directed adjacency structure in CSR form
(per-node sorted, duplicate-free neighbor lists), integer class labels for
every node, and an optional dense feature matrix. Undirected input is
represented as symmetric directed edge pairs. Self loops are allowed and
kept; metric code excludes them explicitly.

On disk a graph is a directory of plain text files:

    edges.txt       whitespace-separated "src dst" pairs, '#' comments
    labels.txt      "node_id class_id" pairs
    features.csv    row i holds the features of node i (optional)
    manifest.json   num_nodes, num_classes, directed, seed, generator, ...
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MissingLabelError, ParseError, ShapeMismatchError

EDGE_FILE = "edges.txt"
LABEL_FILE = "labels.txt"
FEATURE_FILE = "features.csv"
MANIFEST_FILE = "manifest.json"


@dataclass(eq=False)
class LabeledGraph:
    """Immutable labeled graph with CSR adjacency.

    Attributes:
        indptr: (N+1,) row pointers into ``indices``
        indices: (nnz,) neighbor ids, sorted and unique within each row
        labels: (N,) class index per node, each in [0, num_classes)
        num_classes: number of classes M (empty classes allowed)
        features: optional (N, F) float matrix, row per node
        directed: False when the edge set was mirrored from undirected input
        meta: provenance (generator config, id remapping, seed)
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray
    num_classes: int
    features: np.ndarray | None = None
    directed: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.features is not None:
            self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.validate()
        for arr in (self.indptr, self.indices, self.labels, self.features):
            if arr is not None:
                arr.setflags(write=False)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges: np.ndarray,
        labels: np.ndarray,
        num_classes: int | None = None,
        features: np.ndarray | None = None,
        directed: bool = True,
        meta: dict | None = None,
    ) -> "LabeledGraph":
        """Build a graph from an (E, 2) array of directed edges.

        Duplicate edges collapse to one. With ``directed=False`` every input
        edge (u, v) is stored as both u->v and v->u.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        labels = np.asarray(labels, dtype=np.int64)
        if not directed and len(edges):
            edges = np.concatenate([edges, edges[:, ::-1]])
        if num_classes is None:
            num_classes = int(labels.max()) + 1 if len(labels) else 0
        indptr, indices = _csr_from_pairs(num_nodes, edges)
        return cls(
            indptr=indptr,
            indices=indices,
            labels=labels,
            num_classes=num_classes,
            features=features,
            directed=directed,
            meta=dict(meta or {}),
        )

    def validate(self):
        n = self.num_nodes
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0:
            raise ShapeMismatchError("malformed CSR row pointers")
        if self.indptr[-1] != len(self.indices):
            raise ShapeMismatchError("CSR pointer/index length mismatch")
        if len(self.labels) != n:
            raise ShapeMismatchError(f"expected {n} labels, got {len(self.labels)}")
        if n and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise ValueError("label outside [0, num_classes)")
        if len(self.indices) and (
            self.indices.min() < 0 or self.indices.max() >= n
        ):
            raise ValueError("neighbor id outside [0, num_nodes)")
        for v in range(n):
            row = self.indices[self.indptr[v] : self.indptr[v + 1]]
            if len(row) > 1 and np.any(np.diff(row) <= 0):
                raise ValueError(f"neighbor list of node {v} not sorted/unique")
        if self.features is not None and self.features.shape[0] != n:
            raise ShapeMismatchError(
                f"feature rows ({self.features.shape[0]}) != num_nodes ({n})"
            )

    # -- accessors ------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        """Stored directed edges, self loops included."""
        return len(self.indices)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_sources(self) -> np.ndarray:
        """Source node of every stored edge, aligned with ``indices``."""
        return np.repeat(np.arange(self.num_nodes), self.out_degrees())

    def self_loop_flags(self) -> np.ndarray:
        """Boolean per edge: True where the edge is a self loop."""
        return self.edge_sources() == self.indices

    def num_self_loops(self) -> int:
        return int(self.self_loop_flags().sum())

    def edge_array(self) -> np.ndarray:
        """(E, 2) array of all stored directed edges."""
        return np.column_stack([self.edge_sources(), self.indices])

    def equals(self, other: "LabeledGraph") -> bool:
        """Structural equality on (edges, labels, features, directedness)."""
        if self.num_nodes != other.num_nodes:
            return False
        if self.num_classes != other.num_classes:
            return False
        if self.directed != other.directed:
            return False
        if not (
            np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.labels, other.labels)
        ):
            return False
        if (self.features is None) != (other.features is None):
            return False
        if self.features is not None and not np.array_equal(
            self.features, other.features
        ):
            return False
        return True

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.equals(other)

    def with_features(self, features: np.ndarray | None) -> "LabeledGraph":
        """Copy of this graph with a different feature matrix."""
        return LabeledGraph(
            indptr=self.indptr.copy(),
            indices=self.indices.copy(),
            labels=self.labels.copy(),
            num_classes=self.num_classes,
            features=None if features is None else np.array(features),
            directed=self.directed,
            meta=dict(self.meta),
        )


def _csr_from_pairs(num_nodes: int, edges: np.ndarray):
    """Deduplicate, sort and pack (E,2) edge pairs into CSR arrays."""
    if len(edges) == 0:
        return np.zeros(num_nodes + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if edges.min() < 0 or edges.max() >= num_nodes:
        raise ValueError("edge endpoint outside [0, num_nodes)")
    keys = edges[:, 0] * num_nodes + edges[:, 1]
    keys = np.unique(keys)
    src = keys // num_nodes
    dst = keys % num_nodes
    counts = np.bincount(src, minlength=num_nodes)
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int64)


def symmetrized(g: LabeledGraph) -> LabeledGraph:
    """Mirror every edge, keeping labels/features. Self loops unchanged."""
    edges = g.edge_array()
    return LabeledGraph.from_edges(
        g.num_nodes,
        np.concatenate([edges, edges[:, ::-1]]) if len(edges) else edges,
        g.labels,
        num_classes=g.num_classes,
        features=g.features,
        directed=False,
        meta=dict(g.meta),
    )


# -- file IO ------------------------------------------------------------


def _read_int_pairs(path: Path, what: str) -> np.ndarray:
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected two {what} fields")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-integer token") from exc
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def load_graph(
    edge_path: str | Path,
    label_path: str | Path,
    feature_path: str | Path | None = None,
    directed: bool = True,
    remap_ids: bool = False,
) -> LabeledGraph:
    """Load a graph from edge/label(/feature) files.

    Node count is 1 + the largest node id referenced in any file. Every node
    id appearing in the edge file must carry a label. With
    ``remap_ids=True``, sparse external ids are first compacted to dense
    0..N-1 (in ascending id order); the mapping is kept in ``meta`` and
    written to the manifest on save.
    """
    edge_path, label_path = Path(edge_path), Path(label_path)
    edges = _read_int_pairs(edge_path, "node id")
    label_pairs = _read_int_pairs(label_path, "integer")

    id_map = None
    if remap_ids:
        referenced = np.union1d(
            edges.ravel() if len(edges) else np.zeros(0, np.int64),
            label_pairs[:, 0] if len(label_pairs) else np.zeros(0, np.int64),
        )
        id_map = {int(old): new for new, old in enumerate(referenced)}
        if len(edges):
            edges = np.vectorize(id_map.__getitem__)(edges)
        if len(label_pairs):
            label_pairs = label_pairs.copy()
            label_pairs[:, 0] = np.vectorize(id_map.__getitem__)(label_pairs[:, 0])

    max_id = -1
    if len(edges):
        max_id = max(max_id, int(edges.max()))
    if len(label_pairs):
        max_id = max(max_id, int(label_pairs[:, 0].max()))
    num_nodes = max_id + 1

    labels = np.full(num_nodes, -1, dtype=np.int64)
    if len(label_pairs):
        if label_pairs[:, 0].min() < 0:
            raise ParseError(f"{label_path}: negative node id")
        labels[label_pairs[:, 0]] = label_pairs[:, 1]
    unlabeled = np.flatnonzero(labels < 0)
    if len(unlabeled):
        raise MissingLabelError(
            f"{label_path}: no label for node(s) {unlabeled[:10].tolist()}"
            + ("..." if len(unlabeled) > 10 else "")
        )
    if labels.min() < 0:
        raise ParseError(f"{label_path}: negative class id")
    num_classes = int(labels.max()) + 1 if num_nodes else 0

    features = None
    if feature_path is not None:
        feature_path = Path(feature_path)
        try:
            features = np.loadtxt(feature_path, delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{feature_path}: {exc}") from exc
        if features.shape[0] != num_nodes:
            raise ShapeMismatchError(
                f"{feature_path}: {features.shape[0]} feature rows for "
                f"{num_nodes} nodes"
            )

    meta = {}
    if id_map is not None:
        meta["id_map"] = {str(k): v for k, v in id_map.items()}
    return LabeledGraph.from_edges(
        num_nodes,
        edges,
        labels,
        num_classes=num_classes,
        features=features,
        directed=directed,
        meta=meta,
    )


def save_graph(g: LabeledGraph, out_dir: str | Path) -> Path:
    """Write a graph directory (edges, labels, optional features, manifest).

    Every stored directed edge is written, so reloading with either
    directedness reproduces the same structure. Returns the directory path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    edges = g.edge_array()
    with open(out_dir / EDGE_FILE, "w") as fh:
        fh.write("# src dst\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")
    with open(out_dir / LABEL_FILE, "w") as fh:
        fh.write("# node class\n")
        for v, c in enumerate(g.labels):
            fh.write(f"{v} {c}\n")
    if g.features is not None:
        np.savetxt(out_dir / FEATURE_FILE, g.features, delimiter=",", fmt="%.17g")
    manifest = {
        "num_nodes": g.num_nodes,
        "num_classes": g.num_classes,
        "directed": g.directed,
        "features": None if g.features is None else int(g.features.shape[1]),
        "seed": g.meta.get("seed"),
        "generator": g.meta.get("generator"),
    }
    for key, value in g.meta.items():
        if key not in ("seed", "generator"):
            manifest[key] = value
    with open(out_dir / MANIFEST_FILE, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out_dir


def load_dataset(graph_dir: str | Path) -> LabeledGraph:
    """Load a graph directory written by :func:`save_graph`.

    The stored edge list is already the directed expansion, so edges are
    read as-is; the manifest's ``directed`` flag records the original
    directedness.
    """
    graph_dir = Path(graph_dir)
    manifest_path = graph_dir / MANIFEST_FILE
    manifest = {}
    if manifest_path.exists():
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    feature_path = graph_dir / FEATURE_FILE
    g = load_graph(
        graph_dir / EDGE_FILE,
        graph_dir / LABEL_FILE,
        feature_path if feature_path.exists() else None,
        directed=True,
    )
    meta = {k: v for k, v in manifest.items() if k not in ("num_nodes", "num_classes", "directed", "features")}
    num_classes = int(manifest.get("num_classes", g.num_classes))
    return LabeledGraph(
        indptr=g.indptr.copy(),
        indices=g.indices.copy(),
        labels=g.labels.copy(),
        num_classes=max(num_classes, g.num_classes),
        features=None if g.features is None else g.features.copy(),
        directed=bool(manifest.get("directed", True)),
        meta={k: v for k, v in meta.items() if v is not None},
    )


# -- degree statistics ----------------------------------------------------


@dataclass(frozen=True)
class DegreeStats:
    """Per-node degrees, self-loop counts and the class histogram."""

    in_degree: np.ndarray
    out_degree: np.ndarray
    self_loops: np.ndarray
    class_counts: np.ndarray
    class_weights: np.ndarray

    @property
    def num_self_loops(self) -> int:
        return int(self.self_loops.sum())


def degree_stats(g: LabeledGraph) -> DegreeStats:
    """Compute degree and class statistics.

    Out-degree counts every stored edge including self loops; the self-loop
    count is reported separately so metric code can exclude them. Class
    weights are node counts divided by N, covering isolated nodes too.
    """
    n = g.num_nodes
    out_degree = g.out_degrees()
    in_degree = np.bincount(g.indices, minlength=n).astype(np.int64)
    loops = g.self_loop_flags()
    self_loops = np.bincount(
        g.edge_sources()[loops], minlength=n
    ).astype(np.int64)
    class_counts = np.bincount(g.labels, minlength=g.num_classes).astype(np.int64)
    class_weights = class_counts / n if n else np.zeros(g.num_classes)
    return DegreeStats(
        in_degree=in_degree,
        out_degree=out_degree,
        self_loops=self_loops,
        class_counts=class_counts,
        class_weights=class_weights,
    )
