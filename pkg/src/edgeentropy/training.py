"""Single-trial training: stratified splits, the fit loop, evaluation.

One trial is (split, init, full-batch training, test accuracy). All
randomness for a trial flows through one generator, so two trials built
from identically-keyed generators share their split and initial weights
exactly; the experiment layer relies on this to compare shift modes on
equal footing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGraphError, EmptyMaskError, NumericalError
from .graph import LabeledGraph
from .net import FilterNet, NetConfig
from .optim import Adam
from .rng import as_generator
from .shift import ShiftOperator


@dataclass(frozen=True)
class Split:
    """Boolean node masks; train and test are disjoint and cover all nodes."""

    train_mask: np.ndarray
    test_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "train_mask", np.asarray(self.train_mask, dtype=bool)
        )
        object.__setattr__(
            self, "test_mask", np.asarray(self.test_mask, dtype=bool)
        )
        if self.train_mask.shape != self.test_mask.shape:
            raise ValueError("mask shapes differ")
        if np.any(self.train_mask & self.test_mask):
            raise ValueError("train and test masks overlap")

    @property
    def num_train(self) -> int:
        return int(self.train_mask.sum())

    @property
    def num_test(self) -> int:
        return int(self.test_mask.sum())


def stratified_split(
    labels: np.ndarray, fraction: float, rng
) -> Split:
    """Per-class random split with the given training fraction.

    Every class contributes at least one node to each side, so fractions
    near 0 or 1 stay usable; classes with fewer than two members cannot
    satisfy that and are rejected.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie strictly between 0 and 1")
    labels = np.asarray(labels, dtype=np.int64)
    gen = as_generator(rng)
    train = np.zeros(len(labels), dtype=bool)
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        count = len(members)
        if count < 2:
            raise DegenerateGraphError(
                f"class {cls} has {count} node(s); need at least 2 to split"
            )
        n_train = int(np.floor(fraction * count + 0.5))
        n_train = min(max(n_train, 1), count - 1)
        picked = gen.permutation(count)[:n_train]
        train[members[picked]] = True
    return Split(train_mask=train, test_mask=~train)


def node_features(g: LabeledGraph) -> np.ndarray:
    """The graph's feature matrix, or one-hot node identities without one."""
    if g.features is not None:
        return g.features
    return np.eye(g.num_nodes)


def accuracy(
    net: FilterNet, x: np.ndarray, shift: ShiftOperator,
    labels: np.ndarray, mask: np.ndarray,
) -> float:
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyMaskError("accuracy mask selects no nodes")
    pred = net.predict(x, shift)
    return float((pred[mask] == np.asarray(labels)[mask]).mean())


@dataclass(frozen=True)
class TrainOutcome:
    """Result of one trial; accuracy is NaN when the trial diverged."""

    accuracy: float
    loss_curve: tuple[float, ...]
    diverged: bool
    epochs_run: int


def train(
    g: LabeledGraph,
    shift: ShiftOperator,
    split: Split,
    cfg: NetConfig,
    rng,
) -> tuple[FilterNet, TrainOutcome]:
    """Initialize a fresh network from rng and fit it full-batch.

    Numerical blow-ups are recorded (diverged=True, accuracy NaN), not
    raised: at experiment scale a diverged trial is a data point to count
    and exclude, not a crash.
    """
    gen = as_generator(rng)
    x = node_features(g)
    net = FilterNet(cfg, x.shape[1], g.num_classes)
    net.init_params(gen)
    opt = Adam(
        net.params(),
        learning_rate=cfg.learning_rate,
        beta1=cfg.beta1,
        beta2=cfg.beta2,
        eps=cfg.adam_eps,
    )
    losses: list[float] = []
    diverged = False
    for _ in range(cfg.epochs):
        try:
            loss, grads = net.loss_and_grad(x, shift, g.labels, split.train_mask)
        except NumericalError:
            diverged = True
            break
        losses.append(loss)
        opt.step(grads)
    if not diverged:
        try:
            acc = accuracy(net, x, shift, g.labels, split.test_mask)
        except NumericalError:
            diverged = True
            acc = float("nan")
    else:
        acc = float("nan")
    return net, TrainOutcome(
        accuracy=acc,
        loss_curve=tuple(losses),
        diverged=diverged,
        epochs_run=len(losses),
    )
