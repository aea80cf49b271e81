"""Improvement experiments: structural shift vs identity shift, Monte Carlo.

An experiment fixes one dataset and trains the same architecture under
two (or more) shift modes across training fractions and trials. The
improvement at a fraction is the difference of mean test accuracies
between the first and second configured modes; correlating improvement
against measured edge entropy across datasets is the point of the whole
exercise.

Reproducibility contract: every trial derives all of its randomness from
(base seed, fraction index, trial index) and nothing else, so shift modes
see identical splits and initial weights, reruns are bitwise identical,
and parallel scheduling cannot change any number.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import ConfigMismatchError, ParseError, PlanMismatchError
from .generate import (
    PRESETS,
    GeneratorConfig,
    erdos_renyi_baseline,
    erdos_renyi_graph,
    generate,
    preset_config,
)
from .graph import LabeledGraph, load_dataset
from .metrics import EntropyReport, edge_entropy
from .net import NetConfig
from .rng import RngStream
from .shift import MODES, ShiftOperator, build_shift
from .training import stratified_split, train

# Stream ids partitioning a plan's seed space.
GEN_STREAM = 0
TRAIN_STREAM = 1
CONTROL_STREAM = 2

# "er_control" swaps in a density-matched random shift: same node count,
# same expected edge count, structure independent of labels.
EXPERIMENT_MODES = MODES + ("er_control",)

DATASET_KINDS = ("preset", "blockmodel", "erdos_renyi", "saved")


@dataclass(frozen=True)
class DatasetSpec:
    """Where one experiment's graph comes from.

    kind "preset" names a built-in generator setup; "blockmodel" spells
    the generator out; "erdos_renyi" builds the label-independent control
    graph; "saved" loads a dataset directory from disk.
    """

    name: str
    kind: str = "preset"
    preset: str | None = None
    num_nodes: int | None = None
    class_sizes: tuple[int, ...] | None = None
    target_probs: tuple[tuple[float, ...], ...] | None = None
    sparsity: float | None = None
    edge_prob: float | None = None
    feature_dim: int | None = None
    feature_signal: float = 0.0
    path: str | None = None

    def __post_init__(self):
        if self.class_sizes is not None:
            object.__setattr__(
                self, "class_sizes", tuple(int(c) for c in self.class_sizes)
            )
        if self.target_probs is not None:
            object.__setattr__(
                self,
                "target_probs",
                tuple(tuple(float(p) for p in row) for row in self.target_probs),
            )
        if not self.name:
            raise ConfigMismatchError("dataset needs a name")
        if self.kind not in DATASET_KINDS:
            raise ConfigMismatchError(
                f"unknown dataset kind {self.kind!r}; choose from {DATASET_KINDS}"
            )
        required = {
            "preset": ("preset",),
            "blockmodel": ("num_nodes", "class_sizes", "target_probs", "sparsity"),
            "erdos_renyi": ("num_nodes", "class_sizes", "edge_prob"),
            "saved": ("path",),
        }[self.kind]
        missing = [f for f in required if getattr(self, f) is None]
        if missing:
            raise ConfigMismatchError(
                f"dataset {self.name!r} (kind {self.kind}) is missing {missing}"
            )
        if self.kind == "preset" and self.preset not in PRESETS:
            raise ConfigMismatchError(
                f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}"
            )

    def materialize(self, seed: int) -> LabeledGraph:
        """Generate or load the graph this spec describes."""
        if self.kind == "saved":
            return load_dataset(self.path)
        fdim = 16 if self.feature_dim is None else self.feature_dim
        if self.kind == "preset":
            cfg = preset_config(
                self.preset,
                num_nodes=self.num_nodes or 3000,
                feature_dim=fdim,
                feature_signal=self.feature_signal,
                seed=seed,
            )
            cfg = dataclasses.replace(cfg, stream_id=GEN_STREAM)
            return generate(cfg)
        if self.kind == "blockmodel":
            cfg = GeneratorConfig(
                num_nodes=self.num_nodes,
                class_sizes=self.class_sizes,
                target_probs=np.asarray(self.target_probs),
                sparsity=self.sparsity,
                feature_dim=fdim,
                feature_signal=self.feature_signal,
                seed=seed,
                stream_id=GEN_STREAM,
            )
            return generate(cfg)
        return erdos_renyi_graph(
            num_nodes=self.num_nodes,
            edge_prob=self.edge_prob,
            class_sizes=self.class_sizes,
            feature_dim=fdim,
            feature_signal=self.feature_signal,
            seed=seed,
            stream_id=GEN_STREAM,
        )

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if self.class_sizes is not None:
            d["class_sizes"] = list(self.class_sizes)
        if self.target_probs is not None:
            d["target_probs"] = [list(row) for row in self.target_probs]
        return d


DEFAULT_FRACTIONS = tuple(round(0.1 * k, 1) for k in range(1, 10))


@dataclass(frozen=True)
class ExperimentPlan:
    """One dataset, one architecture, a grid of fractions x trials x modes."""

    dataset: DatasetSpec
    net: NetConfig = field(default_factory=NetConfig)
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    trials: int = 100
    modes: tuple[str, ...] = ("normalized", "identity")
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "fractions", tuple(float(f) for f in self.fractions)
        )
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.fractions:
            raise ValueError("need at least one training fraction")
        if any(not 0.0 < f < 1.0 for f in self.fractions):
            raise ValueError("fractions must lie strictly between 0 and 1")
        if any(b <= a for a, b in zip(self.fractions, self.fractions[1:])):
            raise ValueError("fractions must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if len(self.modes) < 2:
            raise ValueError("need at least two shift modes to compare")
        bad = [m for m in self.modes if m not in EXPERIMENT_MODES]
        if bad:
            raise ValueError(
                f"unknown shift mode(s) {bad}; choose from {EXPERIMENT_MODES}"
            )

    @property
    def name(self) -> str:
        return self.dataset.name

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset.to_dict(),
            "net": self.net.to_dict(),
            "fractions": list(self.fractions),
            "trials": self.trials,
            "modes": list(self.modes),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentPlan":
        return cls(
            dataset=DatasetSpec(**d["dataset"]),
            net=NetConfig(**d["net"]),
            fractions=tuple(d["fractions"]),
            trials=d["trials"],
            modes=tuple(d["modes"]),
            seed=d["seed"],
        )


@dataclass(frozen=True)
class TrialRecord:
    """One (fraction, mode, trial) outcome."""

    fraction: float
    mode: str
    mode_index: int
    trial: int
    accuracy: float
    diverged: bool


@dataclass(frozen=True)
class CellStats:
    """Aggregate over one (fraction, mode) cell's trials."""

    fraction: float
    mode: str
    mode_index: int
    mean_accuracy: float
    std_accuracy: float
    n_valid: int
    n_diverged: int


def none_if_nan(x: float) -> float | None:
    """NaN is not valid JSON; serialize it as null."""
    return None if isinstance(x, float) and math.isnan(x) else x


def _aggregate(records: list[TrialRecord]) -> CellStats:
    ref = records[0]
    vals = np.array([r.accuracy for r in records if not r.diverged])
    n_div = sum(r.diverged for r in records)
    if len(vals) == 0:
        mean, std = float("nan"), float("nan")
    else:
        mean = float(vals.mean())
        std = float(vals.std(ddof=0))  # trials = 1 gives std 0, not nan
    return CellStats(
        fraction=ref.fraction,
        mode=ref.mode,
        mode_index=ref.mode_index,
        mean_accuracy=mean,
        std_accuracy=std,
        n_valid=len(vals),
        n_diverged=n_div,
    )


@dataclass(frozen=True)
class ExperimentResult:
    """All trial records for a plan plus the dataset's metric snapshot."""

    plan: ExperimentPlan
    records: tuple[TrialRecord, ...]
    metrics: EntropyReport

    def cell(self, fraction: float, mode_index: int) -> CellStats:
        recs = [
            r
            for r in self.records
            if r.mode_index == mode_index
            and math.isclose(r.fraction, fraction, abs_tol=1e-12)
        ]
        if not recs:
            raise PlanMismatchError(
                f"no records for fraction {fraction} mode index {mode_index}"
            )
        return _aggregate(recs)

    def improvement(self, fraction: float) -> float:
        """mean accuracy(modes[0]) - mean accuracy(modes[1]) at a fraction."""
        a = self.cell(fraction, 0).mean_accuracy
        b = self.cell(fraction, 1).mean_accuracy
        return a - b

    def has_fraction(self, fraction: float) -> bool:
        return any(
            math.isclose(f, fraction, abs_tol=1e-12) for f in self.plan.fractions
        )

    def to_dict(self) -> dict:
        cells = []
        for f in self.plan.fractions:
            for i in range(len(self.plan.modes)):
                d = dataclasses.asdict(self.cell(f, i))
                d["mean_accuracy"] = none_if_nan(d["mean_accuracy"])
                d["std_accuracy"] = none_if_nan(d["std_accuracy"])
                cells.append(d)
        return {
            "plan": self.plan.to_dict(),
            "metrics": self.metrics.to_dict(),
            "records": [
                {
                    "fraction": r.fraction,
                    "mode": r.mode,
                    "mode_index": r.mode_index,
                    "trial": r.trial,
                    "accuracy": None if r.diverged else r.accuracy,
                    "diverged": r.diverged,
                }
                for r in self.records
            ],
            "summary": {
                "cells": cells,
                "improvements": [
                    {"fraction": f, "improvement": none_if_nan(self.improvement(f))}
                    for f in self.plan.fractions
                ],
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        m = d["metrics"]
        metrics = EntropyReport(
            per_class=np.asarray(m["per_class"], dtype=np.float64),
            class_weights=np.asarray(m["class_weights"], dtype=np.float64),
            edge_entropy=m["edge_entropy"],
            intra_class_ratio=m["intra_class_ratio"],
            clustering_coefficient=m["clustering_coefficient"],
        )
        records = tuple(
            TrialRecord(
                fraction=r["fraction"],
                mode=r["mode"],
                mode_index=r["mode_index"],
                trial=r["trial"],
                accuracy=float("nan") if r["accuracy"] is None else r["accuracy"],
                diverged=r["diverged"],
            )
            for r in d["records"]
        )
        return cls(
            plan=ExperimentPlan.from_dict(d["plan"]),
            records=records,
            metrics=metrics,
        )


def _control_shift(g: LabeledGraph, seed: int) -> ShiftOperator:
    """Normalized shift of a density-matched label-independent graph."""
    n = g.num_nodes
    non_loop = g.num_edges - g.num_self_loops()
    p = non_loop / (n * (n - 1)) if n > 1 else 0.0
    control = erdos_renyi_baseline(
        n, p, g.labels, RngStream(seed, CONTROL_STREAM)
    )
    return build_shift(control, "normalized")


def _build_shifts(
    g: LabeledGraph, modes: tuple[str, ...], seed: int
) -> dict[str, ShiftOperator]:
    out: dict[str, ShiftOperator] = {}
    for mode in modes:
        if mode in out:
            continue
        if mode == "er_control":
            out[mode] = _control_shift(g, seed)
        else:
            out[mode] = build_shift(g, mode)
    return out


def _run_trial(
    plan: ExperimentPlan,
    graph: LabeledGraph,
    shifts: dict[str, ShiftOperator],
    frac_idx: int,
    trial: int,
) -> list[TrialRecord]:
    """All modes for one (fraction, trial); identical split and init per mode.

    Each mode restarts a generator keyed only by (fraction index, trial),
    so the draw sequence — split first, then weights — matches across
    modes exactly.
    """
    stream = RngStream(plan.seed, TRAIN_STREAM)
    fraction = plan.fractions[frac_idx]
    records = []
    for mode_idx, mode in enumerate(plan.modes):
        gen = stream.generator(frac_idx, trial)
        split = stratified_split(graph.labels, fraction, gen)
        _, outcome = train(graph, shifts[mode], split, plan.net, gen)
        records.append(
            TrialRecord(
                fraction=fraction,
                mode=mode,
                mode_index=mode_idx,
                trial=trial,
                accuracy=outcome.accuracy,
                diverged=outcome.diverged,
            )
        )
    return records


_WORKER: dict = {}


def _init_worker(plan: ExperimentPlan, graph: LabeledGraph) -> None:
    _WORKER["plan"] = plan
    _WORKER["graph"] = graph
    _WORKER["shifts"] = _build_shifts(graph, plan.modes, plan.seed)


def _worker_cell(args: tuple[int, int]) -> list[TrialRecord]:
    frac_idx, trial = args
    return _run_trial(
        _WORKER["plan"], _WORKER["graph"], _WORKER["shifts"], frac_idx, trial
    )


def run_experiment(
    plan: ExperimentPlan, jobs: int = 1, progress=None
) -> ExperimentResult:
    """Run every (fraction, mode, trial) cell of a plan.

    ``jobs`` > 1 fans trials out to worker processes; results are folded
    back in (fraction, mode, trial) order, so parallel and serial runs
    produce identical output. ``progress``, if given, is called as
    progress(done, total) after each (fraction, trial) task.
    """
    graph = plan.dataset.materialize(plan.seed)
    metrics = edge_entropy(graph)
    tasks = [
        (fi, t) for fi in range(len(plan.fractions)) for t in range(plan.trials)
    ]
    total = len(tasks)
    chunks: list[list[TrialRecord]] = []
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(plan, graph)
        ) as pool:
            for done, recs in enumerate(pool.map(_worker_cell, tasks), start=1):
                chunks.append(recs)
                if progress is not None:
                    progress(done, total)
    else:
        shifts = _build_shifts(graph, plan.modes, plan.seed)
        for done, (fi, t) in enumerate(tasks, start=1):
            chunks.append(_run_trial(plan, graph, shifts, fi, t))
            if progress is not None:
                progress(done, total)
    flat = [r for chunk in chunks for r in chunk]
    flat.sort(key=lambda r: (r.fraction, r.mode_index, r.trial))
    return ExperimentResult(plan=plan, records=tuple(flat), metrics=metrics)


@dataclass(frozen=True)
class TableRow:
    dataset: str
    edge_entropy: float
    intra_class_ratio: float
    clustering_coefficient: float
    improvement: float


@dataclass(frozen=True)
class ImprovementTable:
    """Datasets ranked by edge entropy with their improvements."""

    fraction: float
    rows: tuple[TableRow, ...]
    spearman: float | None

    def to_dict(self) -> dict:
        rows = []
        for r in self.rows:
            d = dataclasses.asdict(r)
            d["improvement"] = none_if_nan(d["improvement"])
            rows.append(d)
        return {
            "fraction": self.fraction,
            "rows": rows,
            "spearman": self.spearman,
        }


def entropy_improvement_table(
    results: list[ExperimentResult], fraction: float = 0.3
) -> ImprovementTable:
    """Rank datasets by measured entropy and correlate with improvement.

    Rows sort by entropy ascending (name breaks ties). Spearman rank
    correlation between entropy and improvement is None when undefined,
    e.g. when either column is constant.
    """
    if len(results) < 2:
        raise PlanMismatchError(
            f"need at least two experiment results, got {len(results)}"
        )
    missing = [r.plan.name for r in results if not r.has_fraction(fraction)]
    if missing:
        raise PlanMismatchError(
            f"fraction {fraction} missing from result(s): {missing}"
        )
    rows = [
        TableRow(
            dataset=r.plan.name,
            edge_entropy=r.metrics.edge_entropy,
            intra_class_ratio=r.metrics.intra_class_ratio,
            clustering_coefficient=r.metrics.clustering_coefficient,
            improvement=r.improvement(fraction),
        )
        for r in results
    ]
    rows.sort(key=lambda row: (row.edge_entropy, row.dataset))
    ents = [row.edge_entropy for row in rows]
    imps = [row.improvement for row in rows]
    with warnings.catch_warnings():
        # constant input makes the statistic NaN; mapped to None below
        warnings.simplefilter("ignore", stats.ConstantInputWarning)
        rho = stats.spearmanr(ents, imps).statistic
    spearman = None if (rho is None or not np.isfinite(rho)) else float(rho)
    return ImprovementTable(fraction=fraction, rows=tuple(rows), spearman=spearman)


@dataclass(frozen=True)
class CurveRow:
    dataset: str
    fraction: float
    mode: str
    mean_accuracy: float
    std_accuracy: float
    n_valid: int
    n_diverged: int
    improvement: float


def sweep_curves(result: ExperimentResult) -> list[CurveRow]:
    """Flat per-(fraction, mode) rows for plotting or CSV export."""
    rows = []
    for f in result.plan.fractions:
        imp = result.improvement(f)
        for i, mode in enumerate(result.plan.modes):
            c = result.cell(f, i)
            rows.append(
                CurveRow(
                    dataset=result.plan.name,
                    fraction=f,
                    mode=mode,
                    mean_accuracy=c.mean_accuracy,
                    std_accuracy=c.std_accuracy,
                    n_valid=c.n_valid,
                    n_diverged=c.n_diverged,
                    improvement=imp,
                )
            )
    return rows


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


CURVES_HEADER = (
    "dataset,fraction,mode,mean_accuracy,std_accuracy,"
    "n_valid,n_diverged,improvement"
)
TABLE_HEADER = (
    "dataset,edge_entropy,intra_class_ratio,clustering_coefficient,improvement"
)


def curves_csv_text(results: list[ExperimentResult]) -> str:
    lines = [CURVES_HEADER]
    for result in results:
        for r in sweep_curves(result):
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (
                        r.dataset,
                        r.fraction,
                        r.mode,
                        r.mean_accuracy,
                        r.std_accuracy,
                        r.n_valid,
                        r.n_diverged,
                        r.improvement,
                    )
                )
            )
    return "\n".join(lines) + "\n"


def table_csv_text(table: ImprovementTable) -> str:
    lines = [TABLE_HEADER]
    for r in table.rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.dataset,
                    r.edge_entropy,
                    r.intra_class_ratio,
                    r.clustering_coefficient,
                    r.improvement,
                )
            )
        )
    spearman = "undefined" if table.spearman is None else repr(table.spearman)
    lines.append(f"# spearman {spearman} fraction {_fmt(table.fraction)}")
    return "\n".join(lines) + "\n"


def write_curves_csv(results: list[ExperimentResult], path) -> None:
    Path(path).write_text(curves_csv_text(results))


def write_table_csv(table: ImprovementTable, path) -> None:
    Path(path).write_text(table_csv_text(table))


@dataclass(frozen=True)
class PlanBundle:
    """A named set of single-dataset plans run and reported together."""

    name: str
    plans: tuple[ExperimentPlan, ...]
    table_fraction: float = 0.3

    def __post_init__(self):
        if not self.plans:
            raise ValueError("bundle contains no plans")
        names = [p.name for p in self.plans]
        if len(set(names)) != len(names):
            raise ConfigMismatchError(f"duplicate dataset names in bundle: {names}")


# Plan-file keys that configure the ExperimentPlan rather than the dataset.
_PLAN_KEYS = ("fractions", "trials", "modes", "seed", "net")


def _plan_from_entry(entry: dict, defaults: dict, where: str) -> ExperimentPlan:
    merged = {**defaults, **entry}
    net_dict = merged.pop("net", {})
    if not isinstance(net_dict, dict):
        raise ParseError(f"{where}: 'net' must be an object")
    plan_kwargs = {}
    for key in ("fractions", "trials", "modes", "seed"):
        if key in merged:
            plan_kwargs[key] = merged.pop(key)
    if "fractions" in plan_kwargs:
        plan_kwargs["fractions"] = tuple(plan_kwargs["fractions"])
    if "modes" in plan_kwargs:
        plan_kwargs["modes"] = tuple(plan_kwargs["modes"])
    try:
        net = NetConfig(
            **{
                k: tuple(v) if isinstance(v, list) else v
                for k, v in net_dict.items()
            }
        )
        spec_kwargs = dict(merged)
        if "class_sizes" in spec_kwargs and spec_kwargs["class_sizes"] is not None:
            spec_kwargs["class_sizes"] = tuple(spec_kwargs["class_sizes"])
        if "target_probs" in spec_kwargs and spec_kwargs["target_probs"] is not None:
            spec_kwargs["target_probs"] = tuple(
                tuple(row) for row in spec_kwargs["target_probs"]
            )
        dataset = DatasetSpec(**spec_kwargs)
        return ExperimentPlan(dataset=dataset, net=net, **plan_kwargs)
    except TypeError as exc:
        raise ParseError(f"{where}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def load_plan_file(path) -> PlanBundle:
    """Parse a plan JSON file into a bundle of single-dataset plans.

    Shape: {"name", "table_fraction", "defaults": {...}, "datasets":
    [{...}, ...]}. Every key in defaults applies to each dataset entry
    unless the entry overrides it; "net" objects are replaced whole, not
    merged key-by-key.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read plan file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")
    datasets = raw.get("datasets")
    if not isinstance(datasets, list) or not datasets:
        raise ParseError(f"{path}: 'datasets' must be a non-empty list")
    defaults = raw.get("defaults", {})
    if not isinstance(defaults, dict):
        raise ParseError(f"{path}: 'defaults' must be an object")
    plans = []
    for i, entry in enumerate(datasets):
        if not isinstance(entry, dict):
            raise ParseError(f"{path}: datasets[{i}] must be an object")
        plans.append(_plan_from_entry(entry, defaults, f"{path}: datasets[{i}]"))
    name = raw.get("name", path.stem)
    table_fraction = float(raw.get("table_fraction", 0.3))
    try:
        return PlanBundle(
            name=name, plans=tuple(plans), table_fraction=table_fraction
        )
    except (ValueError, ConfigMismatchError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def run_bundle(
    bundle: PlanBundle, jobs: int = 1, progress=None
) -> list[ExperimentResult]:
    """Run each plan in a bundle in order.

    ``progress``, if given, is called as progress(dataset_name, done,
    total) across the bundle's full task count.
    """
    totals = [len(p.fractions) * p.trials for p in bundle.plans]
    grand_total = sum(totals)
    offset = 0
    results = []
    for plan, count in zip(bundle.plans, totals):
        cb = None
        if progress is not None:
            base = offset

            def cb(done, total, _name=plan.name, _base=base):
                progress(_name, _base + done, grand_total)

        results.append(run_experiment(plan, jobs=jobs, progress=cb))
        offset += count
    return results
