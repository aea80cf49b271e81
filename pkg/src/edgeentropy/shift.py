"""Graph shift operators for polynomial filtering.

A shift operator is the sparse matrix S multiplied into node-signal
matrices by the filter layers. Three modes:

- ``raw``: the directed adjacency A as stored, A[i, j] = 1 iff the graph
  has edge i -> j, so row i of S @ X aggregates from i's out-neighbors.
- ``normalized``: A with its diagonal forced to one (every node keeps a
  self loop), scaled to D^{-1/2} (A + adjustments) D^{-1/2} with D the
  diagonal of row sums. This matrix is similar to the row-stochastic
  D^{-1} A~, so its spectral radius is at most 1 and repeated shifts
  cannot blow up signal magnitude.
- ``identity``: S = I, which turns the filter bank into a plain
  feature-space network; used as the structure-blind reference model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ShapeMismatchError
from .graph import LabeledGraph

MODES = ("raw", "normalized", "identity")


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    """A shift matrix with its transpose cached for backward passes.

    ``matrix`` is None in identity mode: apply/apply_t become no-ops and
    the filter layers skip the multiplications entirely.
    """

    mode: str
    num_nodes: int
    matrix: sp.csr_matrix | None
    matrix_t: sp.csr_matrix | None

    @property
    def is_identity(self) -> bool:
        return self.matrix is None

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] != self.num_nodes:
            raise ShapeMismatchError(
                f"signal has shape {x.shape}, expected ({self.num_nodes}, F)"
            )
        return x

    def apply(self, x: np.ndarray) -> np.ndarray:
        """S @ x."""
        x = self._check(x)
        if self.matrix is None:
            return x
        return self.matrix @ x

    def apply_t(self, x: np.ndarray) -> np.ndarray:
        """S^T @ x, used when gradients flow back through a shift."""
        x = self._check(x)
        if self.matrix_t is None:
            return x
        return self.matrix_t @ x


def _adjacency(g: LabeledGraph) -> sp.csr_matrix:
    n = g.num_nodes
    return sp.csr_matrix(
        (np.ones(g.num_edges, dtype=np.float64), g.indices.copy(), g.indptr.copy()),
        shape=(n, n),
    )


def build_shift(g: LabeledGraph, mode: str) -> ShiftOperator:
    """Construct the shift operator for a graph in the given mode."""
    if mode not in MODES:
        raise ValueError(f"unknown shift mode {mode!r}; choose from {MODES}")
    n = g.num_nodes
    if mode == "identity":
        return ShiftOperator(mode=mode, num_nodes=n, matrix=None, matrix_t=None)
    a = _adjacency(g)
    if mode == "raw":
        m = a
    else:
        a = a.tolil()
        a.setdiag(1.0)
        a = a.tocsr()
        deg = np.asarray(a.sum(axis=1)).ravel()
        inv_sqrt = 1.0 / np.sqrt(deg)  # diagonal forced to 1, so deg >= 1
        m = sp.diags(inv_sqrt) @ a @ sp.diags(inv_sqrt)
        m = sp.csr_matrix(m)
    mt = sp.csr_matrix(m.T)
    return ShiftOperator(mode=mode, num_nodes=n, matrix=m, matrix_t=mt)


def shift_powers_apply(shift: ShiftOperator, x: np.ndarray, taps: int) -> list[np.ndarray]:
    """[x, S x, S^2 x, ..., S^(taps-1) x] without materializing any S^k.

    Each power reuses the previous product, so cost is taps - 1 sparse
    multiplications regardless of how dense S^k would be.
    """
    if taps < 1:
        raise ValueError("taps must be at least 1")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != shift.num_nodes:
        raise ShapeMismatchError(
            f"signal has shape {x.shape}, expected ({shift.num_nodes}, F)"
        )
    powers = [x]
    for _ in range(taps - 1):
        powers.append(shift.apply(powers[-1]))
    return powers
