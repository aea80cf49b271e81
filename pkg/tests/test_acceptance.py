"""Acceptance gate: one test per headline guarantee of the package.

Run with ``pytest -v tests/test_acceptance.py`` to get one pass/fail line
per criterion. Each test prints the numbers it measured, so a failure
shows how far off the build is, not just that it is off.

The criteria, in order:

1. the analytic entropy of reference connectivity matrices,
2. closed-form metrics on hand-built fixture graphs,
3. realized entropy of the shipped generator presets at full scale,
4. connectivity, dense forward, and dataset IO against naive oracles,
5. backpropagated gradients against central finite differences,
6. the desk-scale experiment: low-entropy structure helps more,
7. structure-free controls showing no spurious improvement,
8. bitwise-identical CLI reruns under a fixed seed.
"""

import json
from pathlib import Path

import numpy as np

import edgeentropy
from edgeentropy import (
    DatasetSpec,
    ExperimentPlan,
    FilterNet,
    LabeledGraph,
    NetConfig,
    RngStream,
    build_shift,
    connectivity,
    dataset_entropy,
    degree_stats,
    edge_entropy,
    generate,
    intra_class_ratio,
    load_dataset,
    load_plan_file,
    preset_config,
    run_bundle,
    run_experiment,
    save_graph,
    stratified_split,
    train,
)
from edgeentropy.cli import main
from edgeentropy.experiment import TRAIN_STREAM
from edgeentropy.generate import P_HIGH, P_LOW, erdos_renyi_graph

from conftest import random_labeled_graph
from helpers import (
    assert_grads_close,
    dense_forward,
    finite_difference_grads,
    naive_connectivity_counts,
)


def test_criterion_1_analytic_entropy_values():
    two_class = np.array([[0.96, 0.04], [0.04, 0.96]])
    h2 = dataset_entropy(two_class, np.array([0.5, 0.5]))
    thirds = np.full(3, 1.0 / 3.0)
    h_low = dataset_entropy(np.asarray(P_LOW, dtype=np.float64), thirds)
    h_high = dataset_entropy(np.asarray(P_HIGH, dtype=np.float64), thirds)
    print(f"criterion 1: two-class {h2:.6f} (want 0.24 +/- 0.005)")
    print(f"criterion 1: low matrix {h_low:.6f} (want 0.52 +/- 0.005)")
    print(f"criterion 1: high matrix {h_high:.6f} (want 0.974 +/- 0.001)")
    assert abs(h2 - 0.24) <= 0.005
    assert abs(h_low - 0.52) <= 0.005
    assert abs(h_high - 0.974) <= 0.001


def test_criterion_2_fixture_graph_metrics(
    two_cliques_graph, bipartite_graph, mixed_clique_graph
):
    cliques = edge_entropy(two_cliques_graph)
    bipartite = edge_entropy(bipartite_graph)
    mixed = edge_entropy(mixed_clique_graph)
    mixing = edge_entropy(erdos_renyi_graph(400, 0.05, (200, 200), seed=0))
    print(f"criterion 2: two cliques entropy {cliques.edge_entropy}")
    print(
        f"criterion 2: bipartite entropy {bipartite.edge_entropy} "
        f"intra {bipartite.intra_class_ratio}"
    )
    print(f"criterion 2: random mixing entropy {mixing.edge_entropy:.4f}")
    print(
        f"criterion 2: mixed clique entropy {mixed.edge_entropy:.4f} "
        f"clustering {mixed.clustering_coefficient}"
    )
    assert cliques.edge_entropy == 0.0
    assert bipartite.edge_entropy == 0.0
    assert bipartite.intra_class_ratio == 0.0
    assert abs(mixing.edge_entropy - 1.0) <= 0.05
    assert abs(mixed.edge_entropy - 1.0) <= 0.05
    assert mixed.clustering_coefficient == 1.0


def test_criterion_3_preset_realizations_at_scale():
    targets = {
        "dense_low": 0.521,
        "sparse_low": 0.521,
        "dense_high": 0.974,
        "sparse_high": 0.974,
    }
    for name, target in targets.items():
        g = generate(preset_config(name, num_nodes=3000, seed=0))
        ent = dataset_entropy(
            connectivity(g).probs, degree_stats(g).class_weights
        )
        print(
            f"criterion 3: {name} realized entropy {ent:.4f} "
            f"(want {target} +/- 0.01)"
        )
        assert abs(ent - target) <= 0.01
        if name == "dense_low":
            intra = intra_class_ratio(g)
            print(
                f"criterion 3: dense_low intra-class ratio {intra:.4f} "
                f"(want 0.8 +/- 0.02)"
            )
            assert abs(intra - 0.8) <= 0.02


def test_criterion_4_connectivity_forward_and_io_oracles(tmp_path):
    rng = np.random.default_rng(41)
    for _ in range(200):
        g = random_labeled_graph(rng, max_nodes=50)
        assert np.array_equal(
            connectivity(g).counts, naive_connectivity_counts(g)
        )
    print("criterion 4: connectivity matches naive count on 200 graphs")

    worst = 0.0
    for trial in range(50):
        g = random_labeled_graph(rng, max_nodes=20, features=True)
        layers = 1 + trial % 2
        cfg = NetConfig(
            layer_degrees=tuple(
                int(rng.integers(1, 4)) for _ in range(layers)
            ),
            hidden_dims=tuple(
                int(rng.integers(2, 5)) for _ in range(layers - 1)
            ),
        )
        net = FilterNet(cfg, in_dim=3, num_classes=g.num_classes)
        net.init_params(rng)
        for layer in net.layers:
            layer.bias[:] = rng.normal(scale=0.1, size=layer.bias.shape)
        shift = build_shift(g, ("raw", "normalized", "identity")[trial % 3])
        fast, _ = net.forward(g.features, shift)
        slow = dense_forward(net, g.features, shift)
        worst = max(worst, float(np.abs(fast - slow).max()))
    print(f"criterion 4: dense forward max |diff| {worst:.2e} (want <= 1e-10)")
    assert worst <= 1e-10

    for i in range(10):
        g = random_labeled_graph(rng, max_nodes=30, features=(i % 2 == 0))
        d = tmp_path / f"g{i}"
        save_graph(g, d)
        assert load_dataset(d) == g
    print("criterion 4: save/load round trip preserved 10 graphs")


def test_criterion_5_gradients_match_finite_differences():
    rng = np.random.default_rng(18)
    for trial in range(50):
        g = random_labeled_graph(rng, max_nodes=20, num_classes=2)
        layers = 1 + trial % 2
        cfg = NetConfig(
            layer_degrees=tuple(
                int(rng.integers(1, 4)) for _ in range(layers)
            ),
            hidden_dims=tuple(
                int(rng.integers(2, 5)) for _ in range(layers - 1)
            ),
            weight_decay=float(rng.choice([0.0, 5e-4])),
        )
        net = FilterNet(cfg, in_dim=3, num_classes=2)
        net.init_params(rng)
        x = rng.standard_normal((g.num_nodes, 3))
        mask = rng.random(g.num_nodes) < 0.6
        if not mask.any():
            mask[0] = True
        shift = build_shift(g, ("raw", "normalized", "identity")[trial % 3])
        _, analytic = net.loss_and_grad(x, shift, g.labels, mask)
        numeric = finite_difference_grads(net, x, shift, g.labels, mask)
        assert_grads_close(analytic, numeric, rtol=1e-4)
    print("criterion 5: 50 random configurations within rtol 1e-4")


def test_criterion_6_low_entropy_predicts_larger_improvement():
    plans_dir = Path(edgeentropy.__file__).parent / "plans"
    bundle = load_plan_file(plans_dir / "desk.json")
    results = {r.plan.name: r for r in run_bundle(bundle, jobs=2)}
    imp = {name: r.improvement(0.3) for name, r in results.items()}
    for name in ("dense_low", "dense_high", "sparse_low", "sparse_high"):
        print(
            f"criterion 6: {name} entropy "
            f"{results[name].metrics.edge_entropy:.3f} "
            f"improvement {imp[name]:+.4f}"
        )
    dense_gap = imp["dense_low"] - imp["dense_high"]
    sparse_gap = imp["sparse_low"] - imp["sparse_high"]
    print(
        f"criterion 6: low-minus-high gap dense {dense_gap:+.4f} "
        f"sparse {sparse_gap:+.4f} (want both >= 0.05)"
    )
    assert imp["dense_low"] > imp["dense_high"]
    assert imp["sparse_low"] > imp["sparse_high"]
    assert dense_gap >= 0.05
    assert sparse_gap >= 0.05


def test_criterion_7_structure_free_controls():
    rng = np.random.default_rng(7)
    labels = np.array([0] * 10 + [1] * 10)
    feats = rng.standard_normal((20, 6))
    ring = [(i, (i + 1) % 20) for i in range(20)]
    skip = [(i, (i + 5) % 20) for i in range(20)]
    accs = []
    for pairs in (ring, skip):
        g = LabeledGraph.from_edges(20, pairs, labels, features=feats)
        gen = RngStream(3, TRAIN_STREAM).generator(0, 0)
        split = stratified_split(g.labels, 0.3, gen)
        _, outcome = train(
            g, build_shift(g, "identity"), split, NetConfig(epochs=40), gen
        )
        accs.append(outcome.accuracy)
    print(f"criterion 7: identity accuracy under edge rewiring {accs}")
    assert accs[0] == accs[1]

    plan = ExperimentPlan(
        dataset=DatasetSpec(
            name="er_control",
            kind="erdos_renyi",
            num_nodes=600,
            class_sizes=(200, 200, 200),
            edge_prob=0.05,
            feature_dim=16,
            feature_signal=1.0,
        ),
        net=NetConfig(),
        fractions=(0.3,),
        trials=10,
        modes=("normalized", "identity"),
        seed=0,
    )
    result = run_experiment(plan)
    imp = result.improvement(0.3)
    print(
        f"criterion 7: random-graph control improvement {imp:+.4f} "
        f"(want within +/- 0.03 of zero)"
    )
    assert abs(imp) <= 0.03


ACCEPTANCE_PLAN = {
    "name": "acceptance",
    "table_fraction": 0.3,
    "defaults": {
        "kind": "blockmodel",
        "num_nodes": 40,
        "class_sizes": [20, 20],
        "sparsity": 0.5,
        "feature_dim": 4,
        "fractions": [0.3],
        "trials": 1,
        "modes": ["normalized", "identity"],
        "seed": 0,
        "net": {"layer_degrees": [2, 2], "hidden_dims": [4], "epochs": 5},
    },
    "datasets": [
        {"name": "tight", "target_probs": [[0.8, 0.05], [0.05, 0.8]]},
        {"name": "loose", "target_probs": [[0.4, 0.4], [0.4, 0.4]]},
    ],
}


def test_criterion_8_cli_reruns_are_bitwise_identical(
    tmp_path, monkeypatch, capsys
):
    monkeypatch.chdir(tmp_path)

    def run_twice(argv, outputs):
        seen = []
        for _ in range(2):
            code = main(list(argv))
            captured = capsys.readouterr()
            assert code == 0, captured.err
            files = {}
            for o in outputs:
                p = Path(o)
                found = sorted(p.rglob("*")) if p.is_dir() else [p]
                for f in found:
                    if f.is_file():
                        files[str(f)] = f.read_bytes()
            seen.append((captured.out, files))
        assert seen[0] == seen[1], f"rerun of {argv} changed its output"
        return len(seen[0][1])

    Path("plan.json").write_text(json.dumps(ACCEPTANCE_PLAN))
    checked = 0
    checked += run_twice(
        [
            "generate",
            "--preset",
            "dense_low",
            "--nodes",
            "120",
            "--feature-dim",
            "4",
            "--out",
            "ds",
        ],
        ["ds"],
    )
    checked += run_twice(["analyze", "ds", "--out", "analysis.json"],
                         ["analysis.json"])
    checked += run_twice(
        ["train", "ds", "--epochs", "10", "--hidden", "8", "--out",
         "train.json"],
        ["train.json"],
    )
    checked += run_twice(["experiment", "plan.json", "--out", "res"], ["res"])
    checked += run_twice(
        ["report", "res/results.json", "--out", "figs"], ["figs"]
    )
    print(f"criterion 8: {checked} output files bitwise identical on rerun")
