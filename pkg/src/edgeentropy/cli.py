"""Command-line interface: analyze, generate, train, experiment, report.

Machine formats (json, csv) put the payload alone on stdout; everything
else (progress, warnings) goes to stderr. Every payload embeds the
effective configuration, defaults included, so any output file is enough
to re-derive the run that produced it.

Exit codes: 0 success; 1 verification failure (strict generation out of
tolerance, diverged training, an experiment cell with zero valid trials);
2 usage or IO errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EdgeEntropyError
from .generate import (
    PRESETS,
    GeneratorConfig,
    generate,
    preset_config,
    verify_realization,
)
from .graph import (
    EDGE_FILE,
    FEATURE_FILE,
    LABEL_FILE,
    MANIFEST_FILE,
    LabeledGraph,
    load_dataset,
    load_graph,
    save_graph,
    symmetrized,
)
from .metrics import EntropyReport, connectivity, edge_entropy
from .net import NetConfig
from .rng import RngStream
from .shift import MODES, build_shift
from .training import stratified_split, train
from . import experiment as xp

DEFAULT_SEED = 0

ANALYZE_CSV_HEADER = (
    "num_nodes,num_edges,num_classes,edge_entropy,intra_class_ratio,"
    "clustering_coefficient,per_class_entropies,class_weights"
)
GENERATE_CSV_HEADER = (
    "out_dir,num_nodes,num_edges,target_entropy,realized_entropy,"
    "entropy_deviation,max_prob_deviation,weak_components,within_tolerance"
)
TRAIN_CSV_HEADER = "accuracy,diverged,epochs_run,final_loss"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _config_comment(config: dict) -> str:
    return "# config " + json.dumps(config, sort_keys=True)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _load_any_graph(graph_dir: str, directed: bool) -> LabeledGraph:
    d = Path(graph_dir)
    if not d.is_dir():
        raise OSError(f"graph directory not found: {d}")
    if (d / MANIFEST_FILE).exists():
        return load_dataset(d)
    feature_path = d / FEATURE_FILE
    return load_graph(
        d / EDGE_FILE,
        d / LABEL_FILE,
        feature_path=feature_path if feature_path.exists() else None,
        directed=directed,
    )


def _seed_of(args) -> int:
    return DEFAULT_SEED if args.seed is None else args.seed


# ---------------------------------------------------------------- analyze

def cmd_analyze(args) -> int:
    g = _load_any_graph(args.graph_dir, directed=not args.undirected)
    rep = edge_entropy(g)
    conn = connectivity(g)
    config = {
        "command": "analyze",
        "graph_dir": str(args.graph_dir),
        "directed": bool(g.directed),
        "format": args.format,
        "seed": _seed_of(args),
    }
    if args.format == "json":
        doc = rep.to_dict()
        doc["connectivity_counts"] = [
            [int(c) for c in row] for row in conn.counts
        ]
        doc["connectivity_probs"] = [
            [float(p) for p in row] for row in conn.probs
        ]
        doc["config"] = config
        doc["graph"] = {
            "num_nodes": g.num_nodes,
            "num_edges": g.num_edges,
            "num_classes": g.num_classes,
        }
        text = _json_text(doc)
    elif args.format == "csv":
        row = ",".join(
            _fmt(v)
            for v in (
                g.num_nodes,
                g.num_edges,
                g.num_classes,
                rep.edge_entropy,
                rep.intra_class_ratio,
                rep.clustering_coefficient,
                ";".join(repr(float(h)) for h in rep.per_class),
                ";".join(repr(float(w)) for w in rep.class_weights),
            )
        )
        text = f"{_config_comment(config)}\n{ANALYZE_CSV_HEADER}\n{row}\n"
    else:
        lines = [
            f"graph: {g.num_nodes} nodes, {g.num_edges} edges, "
            f"{g.num_classes} classes",
            f"edge entropy            {rep.edge_entropy:.6f}",
            f"intra-class ratio       {rep.intra_class_ratio:.6f}",
            f"clustering coefficient  {rep.clustering_coefficient:.6f}",
        ]
        for c, (h, w) in enumerate(zip(rep.per_class, rep.class_weights)):
            lines.append(f"  class {c}: entropy {h:.6f}  weight {w:.6f}")
        lines.append(_config_comment(config))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


# --------------------------------------------------------------- generate

def _parse_probs(arg: str):
    if arg.startswith("@"):
        raw = Path(arg[1:]).read_text()
    else:
        raw = arg
    try:
        mat = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"--probs is not valid JSON: {exc}") from exc
    return np.asarray(mat, dtype=np.float64)


def _parse_int_list(arg: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in arg.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ValueError(f"expected comma-separated integers, got {arg!r}") from exc


def cmd_generate(args) -> int:
    seed = _seed_of(args)
    if args.preset and (args.probs or args.class_sizes or args.sparsity is not None):
        raise ValueError("--preset conflicts with --probs/--class-sizes/--sparsity")
    if args.preset:
        cfg = preset_config(
            args.preset,
            num_nodes=args.nodes or 3000,
            feature_dim=args.feature_dim,
            feature_signal=args.feature_signal,
            seed=seed,
        )
    else:
        if not (args.probs and args.class_sizes and args.sparsity is not None):
            raise ValueError(
                "need --preset, or all of --probs, --class-sizes, --sparsity"
            )
        sizes = _parse_int_list(args.class_sizes)
        nodes = args.nodes if args.nodes else sum(sizes)
        cfg = GeneratorConfig(
            num_nodes=nodes,
            class_sizes=sizes,
            target_probs=_parse_probs(args.probs),
            sparsity=args.sparsity,
            feature_dim=args.feature_dim,
            feature_signal=args.feature_signal,
            seed=seed,
        )
    g = generate(cfg)
    if args.undirected:
        g = symmetrized(g)
    out_dir = Path(args.out)
    save_graph(g, out_dir)
    ver = verify_realization(g, cfg, entropy_tolerance=args.tolerance)
    print(
        f"wrote {out_dir}: {g.num_nodes} nodes, {g.num_edges} edges, "
        f"entropy {ver.realized_entropy:.4f} (target {ver.target_entropy:.4f})",
        file=sys.stderr,
    )
    config = {
        "command": "generate",
        "out": str(out_dir),
        "format": args.format,
        "strict": bool(args.strict),
        "tolerance": args.tolerance,
        "generator": cfg.to_dict(),
    }
    if args.format == "csv":
        row = ",".join(
            _fmt(v)
            for v in (
                str(out_dir),
                g.num_nodes,
                g.num_edges,
                ver.target_entropy,
                ver.realized_entropy,
                ver.entropy_deviation,
                ver.max_prob_deviation,
                ver.weak_components,
                ver.within_tolerance,
            )
        )
        text = f"{_config_comment(config)}\n{GENERATE_CSV_HEADER}\n{row}\n"
    elif args.format == "table":
        lines = [
            f"dataset {out_dir}",
            f"nodes {g.num_nodes}  edges {g.num_edges}",
            f"target entropy    {ver.target_entropy:.6f}",
            f"realized entropy  {ver.realized_entropy:.6f}",
            f"within tolerance  {ver.within_tolerance}",
            _config_comment(config),
        ]
        text = "\n".join(lines) + "\n"
    else:
        text = _json_text(
            {
                "config": config,
                "graph": {"num_nodes": g.num_nodes, "num_edges": g.num_edges},
                "verification": ver.to_dict(),
            }
        )
    _emit(text, None)
    if args.strict and not ver.within_tolerance:
        _err(
            f"realized entropy {ver.realized_entropy:.4f} deviates more than "
            f"{args.tolerance} from target {ver.target_entropy:.4f}"
        )
        return 1
    return 0


# ------------------------------------------------------------------ train

def cmd_train(args) -> int:
    seed = _seed_of(args)
    g = _load_any_graph(args.graph_dir, directed=True)
    net_cfg = NetConfig(
        layer_degrees=_parse_int_list(args.degrees),
        hidden_dims=_parse_int_list(args.hidden),
        learning_rate=args.lr,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
    )
    gen = RngStream(seed, xp.TRAIN_STREAM).generator(0, 0)
    split = stratified_split(g.labels, args.fraction, gen)
    if args.shift_graph:
        sub = _load_any_graph(args.shift_graph, directed=True)
        if sub.num_nodes != g.num_nodes:
            raise ValueError(
                f"substitute graph has {sub.num_nodes} nodes, "
                f"dataset has {g.num_nodes}"
            )
        shift = build_shift(sub, args.shift)
    else:
        shift = build_shift(g, args.shift)
    _, outcome = train(g, shift, split, net_cfg, gen)
    config = {
        "command": "train",
        "graph_dir": str(args.graph_dir),
        "shift": args.shift,
        "shift_graph": args.shift_graph,
        "fraction": args.fraction,
        "seed": seed,
        "format": args.format,
        "net": net_cfg.to_dict(),
    }
    final_loss = outcome.loss_curve[-1] if outcome.loss_curve else float("nan")
    if args.format == "csv":
        row = ",".join(
            _fmt(v)
            for v in (outcome.accuracy, outcome.diverged, outcome.epochs_run,
                      final_loss)
        )
        text = f"{_config_comment(config)}\n{TRAIN_CSV_HEADER}\n{row}\n"
    elif args.format == "table":
        lines = [
            f"test accuracy {outcome.accuracy:.4f}"
            if not outcome.diverged
            else "test accuracy n/a (diverged)",
            f"epochs run    {outcome.epochs_run}",
            f"final loss    {final_loss:.6f}",
            _config_comment(config),
        ]
        text = "\n".join(lines) + "\n"
    else:
        text = _json_text(
            {
                "config": config,
                "result": {
                    "accuracy": None if outcome.diverged else outcome.accuracy,
                    "diverged": outcome.diverged,
                    "epochs_run": outcome.epochs_run,
                    "final_loss": final_loss if outcome.loss_curve else None,
                    "loss_curve": list(outcome.loss_curve),
                },
            }
        )
    _emit(text, args.out)
    if outcome.diverged:
        _err("training diverged")
        return 1
    return 0


# ------------------------------------------------------------- experiment

def _progress_printer(total_hint=None):
    state = {"last": -1}

    def cb(name, done, total):
        step = max(1, total // 20)
        if done == total or done % step == 0:
            if done != state["last"]:
                print(f"{name}: {done}/{total} cells", file=sys.stderr)
                state["last"] = done

    return cb


def cmd_experiment(args) -> int:
    bundle = xp.load_plan_file(args.plan_file)
    if args.seed is not None:
        import dataclasses

        bundle = xp.PlanBundle(
            name=bundle.name,
            plans=tuple(
                dataclasses.replace(p, seed=args.seed) for p in bundle.plans
            ),
            table_fraction=bundle.table_fraction,
        )
    config = {
        "command": "experiment",
        "plan_file": str(args.plan_file),
        "bundle": bundle.name,
        "seed": "per-plan" if args.seed is None else args.seed,
        "jobs": args.jobs,
        "out": str(args.out),
        "dry_run": bool(args.dry_run),
    }
    cells = sum(len(p.fractions) * p.trials for p in bundle.plans)
    trainings = sum(
        len(p.fractions) * p.trials * len(p.modes) for p in bundle.plans
    )
    if args.dry_run:
        _emit(
            _json_text(
                {
                    "config": config,
                    "dry_run": {
                        "datasets": len(bundle.plans),
                        "cells": cells,
                        "trainings": trainings,
                    },
                }
            ),
            None,
        )
        return 0
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = xp.run_bundle(bundle, jobs=args.jobs, progress=_progress_printer())
    results_doc = {
        "name": bundle.name,
        "table_fraction": bundle.table_fraction,
        "config": config,
        "results": [r.to_dict() for r in results],
    }
    (out_dir / "results.json").write_text(_json_text(results_doc))
    xp.write_curves_csv(results, out_dir / "curves.csv")
    table = None
    if len(results) >= 2:
        table = xp.entropy_improvement_table(results, bundle.table_fraction)
        xp.write_table_csv(table, out_dir / "table.csv")
    empty_cells = []
    for r in results:
        for f in r.plan.fractions:
            for i in range(len(r.plan.modes)):
                c = r.cell(f, i)
                if c.n_valid == 0:
                    empty_cells.append((r.plan.name, f, r.plan.modes[i]))
    payload = {
        "config": config,
        "out_dir": str(out_dir),
        "datasets": [r.plan.name for r in results],
        "improvements": {
            r.plan.name: {
                _fmt(f): xp.none_if_nan(r.improvement(f))
                for f in r.plan.fractions
            }
            for r in results
        },
    }
    if table is not None:
        payload["table"] = table.to_dict()
    _emit(_json_text(payload), None)
    if empty_cells:
        _err(f"cell(s) with zero valid trials: {empty_cells}")
        return 1
    return 0


# ----------------------------------------------------------------- report

def cmd_report(args) -> int:
    from . import report as rp

    path = Path(args.results)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise EdgeEntropyError(f"{path} is not valid JSON: {exc}") from exc
    if "results" not in doc:
        raise EdgeEntropyError(f"{path} does not look like an experiment bundle")
    results = [xp.ExperimentResult.from_dict(d) for d in doc["results"]]
    table_fraction = float(doc.get("table_fraction", 0.3))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    xp.write_curves_csv(results, out_dir / "curves.csv")
    written.append(str(out_dir / "curves.csv"))
    rp.render_curves(results, out_dir / "curves.png")
    written.append(str(out_dir / "curves.png"))
    if len(results) >= 2:
        table = xp.entropy_improvement_table(results, table_fraction)
        xp.write_table_csv(table, out_dir / "table.csv")
        written.append(str(out_dir / "table.csv"))
        rp.render_improvement(table, out_dir / "improvement.png")
        written.append(str(out_dir / "improvement.png"))
    else:
        print(
            "single dataset: skipping table.csv and improvement.png",
            file=sys.stderr,
        )
    config = {
        "command": "report",
        "results": str(path),
        "out": str(out_dir),
        "table_fraction": table_fraction,
    }
    _emit(_json_text({"config": config, "written": written}), None)
    return 0


# ------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help="base seed (default 0; experiment: override every plan seed)",
    )
    common.add_argument(
        "--jobs", type=int, default=1, help="worker processes (default 1)"
    )
    common.add_argument(
        "--format",
        choices=("json", "csv", "table"),
        default="json",
        help="payload format on stdout (default json)",
    )
    parser = argparse.ArgumentParser(
        prog="edgeentropy",
        description="Quantify label information in graph structure and "
        "measure what a graph-filter network gains from it.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "analyze", parents=[common], help="entropy metrics for a graph directory"
    )
    p.add_argument("graph_dir", help="directory with edges.txt and labels.txt")
    p.add_argument("--out", help="write payload to a file instead of stdout")
    p.add_argument(
        "--undirected",
        action="store_true",
        help="treat edge list as undirected (ignored when a manifest exists)",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser(
        "generate", parents=[common], help="generate a synthetic dataset"
    )
    p.add_argument("--out", required=True, help="dataset directory to write")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named setup")
    p.add_argument("--nodes", type=int, help="node count (preset default 3000)")
    p.add_argument("--class-sizes", help="comma-separated per-class node counts")
    p.add_argument(
        "--probs",
        help="class-to-class connection probabilities as JSON, or @file",
    )
    p.add_argument("--sparsity", type=float, help="global edge probability factor")
    p.add_argument("--feature-dim", type=int, default=16)
    p.add_argument(
        "--feature-signal",
        type=float,
        default=0.0,
        help="per-class mean shift added to features (0 = pure noise)",
    )
    p.add_argument(
        "--tolerance",
        type=float,
        default=0.02,
        help="allowed |realized - target| entropy gap (default 0.02)",
    )
    p.add_argument(
        "--strict",
        action="store_true",
        help="exit 1 when realized entropy is out of tolerance",
    )
    p.add_argument(
        "--undirected",
        action="store_true",
        help="symmetrize the generated graph before saving",
    )
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser(
        "train", parents=[common], help="train once on a dataset directory"
    )
    p.add_argument("graph_dir")
    p.add_argument("--out", help="write payload to a file instead of stdout")
    p.add_argument("--shift", choices=MODES, default="normalized")
    p.add_argument(
        "--shift-graph",
        help="directory of a substitute graph whose structure supplies "
        "the shift (same node count; e.g. a random control graph)",
    )
    p.add_argument("--fraction", type=float, default=0.3)
    p.add_argument("--degrees", default="2,2", help="taps per layer (default 2,2)")
    p.add_argument("--hidden", default="16", help="hidden widths (default 16)")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--weight-decay", type=float, default=5e-4)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "experiment", parents=[common], help="run a plan file end to end"
    )
    p.add_argument("plan_file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--dry-run",
        action="store_true",
        help="print cell counts and exit without running",
    )
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser(
        "report", parents=[common], help="render figures and CSVs from results.json"
    )
    p.add_argument("results", help="results.json produced by the experiment command")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EdgeEntropyError, OSError, ValueError, KeyError) as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
