"""Measure how much label information a graph's wiring carries, and how
much a graph-filter network gains from using it.

The package has three legs:

- metrics: per-class and dataset edge entropy, intra-class ratio, and
  clustering coefficient of a labeled graph;
- generate: synthetic labeled graphs realizing a prescribed interclass
  connectivity profile (and so a prescribed edge entropy);
- net/training/experiment: a from-scratch polynomial graph-filter
  network trained with the real shift operator versus the identity,
  quantifying the accuracy improvement structure buys.

The ``edgeentropy`` console script exposes all of it; ``edgeentropy
--help`` lists the subcommands.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigMismatchError,
    DegenerateGraphError,
    EdgeEntropyError,
    EmptyMaskError,
    MissingLabelError,
    NumericalError,
    ParseError,
    PlanMismatchError,
    ShapeMismatchError,
    ZeroRowError,
)
from .rng import RngStream, as_generator
from .graph import (
    DegreeStats,
    LabeledGraph,
    degree_stats,
    load_dataset,
    load_graph,
    save_graph,
    symmetrized,
)
from .metrics import (
    ConnectivityMatrix,
    EntropyReport,
    clustering_coefficient,
    connectivity,
    dataset_entropy,
    edge_entropy,
    intra_class_ratio,
    per_class_entropy,
)
from .generate import (
    P_HIGH,
    P_LOW,
    PRESETS,
    GeneratorConfig,
    RealizationReport,
    erdos_renyi_baseline,
    erdos_renyi_graph,
    generate,
    normalize_counts,
    preset_config,
    verify_realization,
)
from .shift import MODES, ShiftOperator, build_shift, shift_powers_apply
from .net import FilterLayer, FilterNet, NetConfig
from .optim import Adam
from .training import (
    Split,
    TrainOutcome,
    accuracy,
    node_features,
    stratified_split,
    train,
)
from .experiment import (
    DatasetSpec,
    ExperimentPlan,
    ExperimentResult,
    ImprovementTable,
    PlanBundle,
    TrialRecord,
    entropy_improvement_table,
    load_plan_file,
    run_bundle,
    run_experiment,
    sweep_curves,
    write_curves_csv,
    write_table_csv,
)

__all__ = [
    "__version__",
    "Adam",
    "ConfigMismatchError",
    "ConnectivityMatrix",
    "DatasetSpec",
    "DegenerateGraphError",
    "DegreeStats",
    "EdgeEntropyError",
    "EmptyMaskError",
    "EntropyReport",
    "ExperimentPlan",
    "ExperimentResult",
    "FilterLayer",
    "FilterNet",
    "GeneratorConfig",
    "ImprovementTable",
    "LabeledGraph",
    "MissingLabelError",
    "MODES",
    "NetConfig",
    "NumericalError",
    "P_HIGH",
    "P_LOW",
    "ParseError",
    "PlanBundle",
    "PlanMismatchError",
    "PRESETS",
    "RealizationReport",
    "RngStream",
    "ShapeMismatchError",
    "ShiftOperator",
    "Split",
    "TrainOutcome",
    "TrialRecord",
    "ZeroRowError",
    "accuracy",
    "as_generator",
    "build_shift",
    "clustering_coefficient",
    "connectivity",
    "dataset_entropy",
    "degree_stats",
    "edge_entropy",
    "entropy_improvement_table",
    "erdos_renyi_baseline",
    "erdos_renyi_graph",
    "generate",
    "intra_class_ratio",
    "load_dataset",
    "load_graph",
    "load_plan_file",
    "node_features",
    "normalize_counts",
    "per_class_entropy",
    "preset_config",
    "run_bundle",
    "run_experiment",
    "save_graph",
    "shift_powers_apply",
    "stratified_split",
    "sweep_curves",
    "symmetrized",
    "train",
    "verify_realization",
    "write_curves_csv",
    "write_table_csv",
]
