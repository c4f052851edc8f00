import json

from groupnets.cli import main
from groupnets.dynamics import (
    NoiseModel,
    build_consensus_matrix,
    convergence_time,
    hitting_times,
    second_eigenvalue_modulus,
    spectral_radius,
    steady_state_deviation,
)
from groupnets.experiments import SweepConfig, read_records_csv
from groupnets.generators import generate
from groupnets.graphs import read_edge_list, structural_summary


def run(*argv):
    return main(list(argv))


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("gen", "--modality", "bridge", "--n", "50", "--seed", "7", "--out", str(a)) == 0
    assert run("gen", "--modality", "bridge", "--n", "50", "--seed", "7", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_formats(tmp_path):
    edges = tmp_path / "g.edges"
    dot = tmp_path / "g.dot"
    assert run("gen", "--modality", "liaison", "--n", "30", "--seed", "1",
               "--out", str(edges), "--format", "edges") == 0
    g = read_edge_list(edges)
    mg = generate("liaison", 30, seed=1)
    assert g.edges == mg.graph.edges
    assert run("gen", "--modality", "liaison", "--n", "30", "--seed", "1",
               "--out", str(dot), "--format", "dot") == 0
    assert "subgraph cluster_0" in dot.read_text()


def test_gen_then_metrics_matches_in_process(tmp_path, capsys):
    path = tmp_path / "g.json"
    assert run("gen", "--modality", "comembership", "--n", "40", "--seed", "3",
               "--out", str(path)) == 0
    assert run("metrics", "--in", str(path)) == 0
    payload = json.loads(capsys.readouterr().out)

    mg = generate("comembership", 40, seed=3)
    summary = structural_summary(mg.graph)
    sys_ = build_consensus_matrix(mg.graph)
    rho2 = second_eigenvalue_modulus(sys_)
    assert payload["avg_shortest_path"] == summary.average_shortest_path
    assert payload["avg_degree"] == summary.average_degree
    assert payload["clustering"] == summary.average_clustering
    assert payload["lambda_max"] == spectral_radius(mg.graph.to_csr())
    assert payload["rho2"] == rho2
    assert payload["tau_asym"] == convergence_time(rho2)
    H = hitting_times(sys_).H
    assert payload["delta_ss"] == steady_state_deviation(sys_, H, NoiseModel(1.0))
    assert payload["group_count"] == mg.group_count


def test_metrics_out_file(tmp_path):
    g = tmp_path / "g.json"
    out = tmp_path / "m.json"
    run("gen", "--modality", "bridge", "--n", "30", "--seed", "0", "--out", str(g))
    assert run("metrics", "--in", str(g), "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["n_actual"] == 30


def test_sweep_flags_and_cardinality(tmp_path):
    out = tmp_path / "runs.csv"
    assert run("sweep", "--sizes", "30,60", "--reps", "2", "--seed", "3",
               "--out", str(out)) == 0
    records = read_records_csv(out)
    assert len(records) == 16


def test_sweep_with_config(tmp_path):
    cfg = SweepConfig(sizes=(30,), replications=2, modalities=("bridge",), master_seed=4)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(cfg.to_json_text())
    out = tmp_path / "runs.csv"
    assert run("sweep", "--config", str(cfg_path), "--out", str(out)) == 0
    records = read_records_csv(out)
    assert len(records) == 2
    assert {r.modality for r in records} == {"bridge"}


def test_sweep_missing_sizes_is_computation_error(tmp_path):
    out = tmp_path / "runs.csv"
    assert run("sweep", "--out", str(out)) == 2


def test_regress_table_and_json(tmp_path, capsys):
    out = tmp_path / "runs.csv"
    run("sweep", "--sizes", "30,60", "--reps", "3", "--seed", "1", "--out", str(out))
    fit_json = tmp_path / "fit.json"
    assert run("regress", "--in", str(out), "--metric", "lambda_max",
               "--out", str(fit_json)) == 0
    table = capsys.readouterr().out
    assert "Co-membership" in table
    assert "R^2" in table
    payload = json.loads(fit_json.read_text())
    assert len(payload["coefficients"]) == 7


def test_plot_four_series(tmp_path):
    runs = tmp_path / "runs.csv"
    svg = tmp_path / "deg.svg"
    run("sweep", "--sizes", "30,60", "--reps", "2", "--seed", "2", "--out", str(runs))
    assert run("plot", "--in", str(runs), "--metric", "avg_degree", "--out", str(svg)) == 0
    text = svg.read_text()
    assert text.count("<polyline") == 4


def test_usage_errors_exit_1(capsys):
    assert run("unknown-command") == 1
    assert run("gen", "--modality", "bridge") == 1  # missing --n/--out
    assert run("plot", "--metric", "nope") == 1  # invalid choice + missing args
    err = capsys.readouterr().err
    assert "usage" in err


def test_computation_errors_exit_2(tmp_path, capsys):
    assert run("regress", "--in", str(tmp_path / "missing.csv"), "--metric", "rho2") == 2
    # n below the minimum group size
    assert run("gen", "--modality", "bridge", "--n", "2", "--seed", "0",
               "--out", str(tmp_path / "g.json")) == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_help_exits_zero():
    assert run("--help") == 0
