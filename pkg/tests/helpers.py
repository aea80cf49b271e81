"""Independent reference implementations the fast code is tested against.

Everything here is written the slow, obvious way on purpose: dense double
loops and explicitly materialized matrix powers. None of it imports the
production kernels it checks.
"""

import numpy as np


def naive_connectivity_counts(g):
    """Interclass edge counts by a double loop over all node pairs."""
    m = g.num_classes
    counts = np.zeros((m, m), dtype=np.int64)
    for u in range(g.num_nodes):
        row = set(int(x) for x in g.neighbors(u))
        for v in range(g.num_nodes):
            if v == u:
                continue
            if v in row:
                counts[g.labels[u], g.labels[v]] += 1
    return counts


def dense_shift_matrix(shift, n):
    """The shift operator as an explicit dense array."""
    if shift.matrix is None:
        return np.eye(n)
    return shift.matrix.toarray()


def dense_forward(net, x, shift):
    """Forward pass with every S^k materialized as a dense matrix."""
    s = dense_shift_matrix(shift, x.shape[0])
    h = np.asarray(x, dtype=np.float64)
    for idx, layer in enumerate(net.layers):
        z = np.zeros((h.shape[0], layer.weights.shape[2]))
        for k in range(layer.taps):
            z += np.linalg.matrix_power(s, k) @ h @ layer.weights[k]
        z += layer.bias
        h = np.maximum(z, 0.0) if idx < len(net.layers) - 1 else z
    return h


def finite_difference_grads(net, x, shift, labels, mask, eps=1e-5):
    """Central finite differences of the loss over every parameter."""
    grads = []
    for p in net.params():
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            plus, _ = net.loss_and_grad(x, shift, labels, mask)
            flat[i] = orig - eps
            minus, _ = net.loss_and_grad(x, shift, labels, mask)
            flat[i] = orig
            gflat[i] = (plus - minus) / (2.0 * eps)
        grads.append(g)
    return grads


def assert_grads_close(analytic, numeric, rtol=1e-4, atol=1e-7):
    """Compare gradient lists with a relative tolerance floored by atol."""
    assert len(analytic) == len(numeric)
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.abs(n), atol / rtol)
        rel = np.abs(a - n) / denom
        assert rel.max() <= rtol, f"max relative gradient error {rel.max():.3e}"
