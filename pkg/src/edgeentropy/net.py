"""Polynomial graph-filter network, written out explicitly.

Each layer is a bank of polynomial filters: with shift matrix S, input
signals H, and per-tap weight matrices W_0 .. W_{d-1},

    Z = sum_k S^k H W_k + b.

Hidden layers apply ReLU to Z; the last layer emits raw class logits.
Forward, loss, and every gradient are computed here by hand so the whole
chain stays inspectable; the only heavy lifting delegated is the sparse
S @ X product itself.

Gradients use the reuse structure of the polynomial: the input gradient
accumulates right-to-left (Horner style),

    acc = dZ W_{d-1}^T;  acc = S^T acc + dZ W_k^T  for k = d-2 .. 0,

which needs d - 1 sparse transposed shifts instead of materializing any
S^k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMaskError, NumericalError, ShapeMismatchError
from .rng import RngStream, as_generator
from .shift import ShiftOperator, shift_powers_apply


@dataclass(frozen=True)
class NetConfig:
    """Architecture and training hyperparameters.

    ``layer_degrees[l]`` is the number of taps in layer l, i.e. shift
    powers 0 .. d-1 enter that layer's filter bank. ``hidden_dims`` has
    one entry per hidden layer, so its length is len(layer_degrees) - 1.
    """

    layer_degrees: tuple[int, ...] = (2, 2)
    hidden_dims: tuple[int, ...] = (16,)
    learning_rate: float = 0.01
    weight_decay: float = 5e-4
    epochs: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        object.__setattr__(
            self, "layer_degrees", tuple(int(d) for d in self.layer_degrees)
        )
        object.__setattr__(
            self, "hidden_dims", tuple(int(h) for h in self.hidden_dims)
        )
        if not self.layer_degrees:
            raise ValueError("need at least one layer")
        if any(d < 1 for d in self.layer_degrees):
            raise ValueError("every layer needs at least one tap")
        if len(self.hidden_dims) != len(self.layer_degrees) - 1:
            raise ValueError(
                f"{len(self.layer_degrees)} layers require "
                f"{len(self.layer_degrees) - 1} hidden widths, "
                f"got {len(self.hidden_dims)}"
            )
        if any(h < 1 for h in self.hidden_dims):
            raise ValueError("hidden widths must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")

    @property
    def num_layers(self) -> int:
        return len(self.layer_degrees)

    def to_dict(self) -> dict:
        return {
            "layer_degrees": list(self.layer_degrees),
            "hidden_dims": list(self.hidden_dims),
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "epochs": self.epochs,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "adam_eps": self.adam_eps,
        }


@dataclass
class FilterLayer:
    """One filter bank: weights stacked (taps, F_in, F_out), bias (F_out,)."""

    weights: np.ndarray
    bias: np.ndarray

    @property
    def taps(self) -> int:
        return self.weights.shape[0]


class FilterNet:
    """A stack of polynomial filter layers ending in class logits."""

    def __init__(self, cfg: NetConfig, in_dim: int, num_classes: int):
        if in_dim < 1 or num_classes < 1:
            raise ValueError("in_dim and num_classes must be positive")
        self.cfg = cfg
        self.in_dim = in_dim
        self.num_classes = num_classes
        dims = (in_dim, *cfg.hidden_dims, num_classes)
        self.layers = [
            FilterLayer(
                weights=np.zeros((cfg.layer_degrees[l], dims[l], dims[l + 1])),
                bias=np.zeros(dims[l + 1]),
            )
            for l in range(cfg.num_layers)
        ]

    def init_params(self, rng: "RngStream | np.random.Generator") -> None:
        """Glorot-uniform weights per tap, zero biases."""
        gen = as_generator(rng)
        for layer in self.layers:
            _, fan_in, fan_out = layer.weights.shape
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            layer.weights[:] = gen.uniform(-bound, bound, layer.weights.shape)
            layer.bias[:] = 0.0

    def params(self) -> list[np.ndarray]:
        """Flat view of all trainable arrays; updated in place by optimizers."""
        out = []
        for layer in self.layers:
            out.append(layer.weights)
            out.append(layer.bias)
        return out

    def _layer_forward(
        self, h: np.ndarray, layer: FilterLayer, shift: ShiftOperator, idx: int
    ) -> tuple[list[np.ndarray], np.ndarray]:
        if h.shape[1] != layer.weights.shape[1]:
            raise ShapeMismatchError(
                f"layer {idx} expects {layer.weights.shape[1]} input features, "
                f"got {h.shape[1]}"
            )
        powers = shift_powers_apply(shift, h, layer.taps)
        z = powers[0] @ layer.weights[0]
        for k in range(1, layer.taps):
            z += powers[k] @ layer.weights[k]
        z += layer.bias
        if not np.isfinite(z).all():
            raise NumericalError(f"non-finite activations in layer {idx}")
        return powers, z

    def forward(
        self, x: np.ndarray, shift: ShiftOperator
    ) -> tuple[np.ndarray, list]:
        """Logits (N, num_classes) plus the cache backward() consumes."""
        h = np.asarray(x, dtype=np.float64)
        if h.ndim != 2:
            raise ShapeMismatchError(f"input must be 2-d, got shape {h.shape}")
        cache = []
        for idx, layer in enumerate(self.layers):
            powers, z = self._layer_forward(h, layer, shift, idx)
            cache.append((powers, z))
            h = np.maximum(z, 0.0) if idx < len(self.layers) - 1 else z
        return h, cache

    def predict(self, x: np.ndarray, shift: ShiftOperator) -> np.ndarray:
        logits, _ = self.forward(x, shift)
        return logits.argmax(axis=1)

    def loss_and_grad(
        self,
        x: np.ndarray,
        shift: ShiftOperator,
        labels: np.ndarray,
        mask: np.ndarray,
    ) -> tuple[float, list[np.ndarray]]:
        """Masked cross-entropy plus L2 on weights; exact gradients.

        The loss averages over mask rows only; the L2 term covers filter
        weights, never biases. Returned gradients align with params().
        """
        mask = np.asarray(mask, dtype=bool)
        labels = np.asarray(labels, dtype=np.int64)
        n_masked = int(mask.sum())
        if n_masked == 0:
            raise EmptyMaskError("loss mask selects no nodes")
        logits, cache = self.forward(x, shift)

        shifted = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        probs = exp / exp.sum(axis=1, keepdims=True)
        rows = np.flatnonzero(mask)
        log_probs = shifted[rows, labels[rows]] - np.log(exp[rows].sum(axis=1))
        data_loss = -log_probs.mean()
        reg_loss = 0.0
        for layer in self.layers:
            reg_loss += 0.5 * self.cfg.weight_decay * float(
                np.sum(layer.weights**2)
            )
        loss = float(data_loss + reg_loss)
        if not np.isfinite(loss):
            raise NumericalError("non-finite loss")

        d_z = probs.copy()
        d_z[rows, labels[rows]] -= 1.0
        d_z[~mask] = 0.0
        d_z /= n_masked

        grads: list[np.ndarray] = []
        for idx in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[idx]
            powers, z = cache[idx]
            d_w = np.empty_like(layer.weights)
            for k in range(layer.taps):
                d_w[k] = powers[k].T @ d_z
            d_w += self.cfg.weight_decay * layer.weights
            d_b = d_z.sum(axis=0)
            grads.append(d_b)
            grads.append(d_w)
            if idx > 0:
                acc = d_z @ layer.weights[layer.taps - 1].T
                for k in range(layer.taps - 2, -1, -1):
                    acc = shift.apply_t(acc) + d_z @ layer.weights[k].T
                _, z_prev = cache[idx - 1]
                d_z = acc * (z_prev > 0.0)
        grads.reverse()
        return loss, grads
