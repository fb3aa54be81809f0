import json
import os

import pytest

from gepo.cli import build_config, build_parser, main


def run_cli(*argv):
    return main(list(argv))


FAST = [
    "--layout", "corridor", "--iterations", "2", "--rollouts", "2",
    "--seed", "1", "--eval-episodes", "2",
]


def test_train_writes_artifacts(tmp_path, capsys):
    out = str(tmp_path / "run")
    assert run_cli("train", *FAST, "--out", out) == 0
    printed = capsys.readouterr().out
    assert "final greedy success" in printed
    assert os.path.exists(os.path.join(out, "metrics_seed1.csv"))
    assert os.path.exists(os.path.join(out, "timings_seed1.csv"))
    assert os.path.exists(os.path.join(out, "summary.csv"))


def test_seed_list_parsing(tmp_path):
    out = str(tmp_path / "run")
    assert run_cli("train", *FAST[:-2], "--seed", "1,2", "--eval-episodes", "2", "--out", out) == 0
    assert os.path.exists(os.path.join(out, "metrics_seed1.csv"))
    assert os.path.exists(os.path.join(out, "metrics_seed2.csv"))


def test_eval_reports_success(capsys):
    assert run_cli("eval", *FAST) == 0
    assert "greedy success" in capsys.readouterr().out


def test_compare_runs_both(capsys):
    assert run_cli("compare", *FAST, "--algorithms", "gepo,grpo") == 0
    out = capsys.readouterr().out
    assert "gepo:" in out and "grpo:" in out


def test_ablate_emits_seven_rows(tmp_path, capsys):
    out = str(tmp_path / "run")
    assert run_cli("ablate", *FAST, "--out", out) == 0
    lines = [l for l in open(os.path.join(out, "ablation.csv")) if not l.startswith("#")]
    assert len(lines) == 1 + 7  # header + full + 3 singles + 3 pairwise


def test_centrality_sweep_emits_four_rows(tmp_path):
    out = str(tmp_path / "run")
    assert run_cli("centrality-sweep", *FAST, "--out", out) == 0
    lines = [l for l in open(os.path.join(out, "centrality_sweep.csv")) if not l.startswith("#")]
    metrics = [l.split(",")[0] for l in lines[1:]]
    assert metrics == ["betweenness", "eigenvector", "closeness", "degree"]


def test_rollout_sweep_blocks(tmp_path, capsys):
    out = str(tmp_path / "run")
    assert run_cli("rollout-sweep", *FAST, "--n-values", "2,3", "--reference-n", "2", "--out", out) == 0
    lines = [l for l in open(os.path.join(out, "rollout_sweep.csv")) if not l.startswith("#")]
    assert len(lines) == 1 + 2


def test_graph_export_document(tmp_path, capsys):
    path = str(tmp_path / "graph.txt")
    assert run_cli("graph-export", *FAST, "--export-path", path) == 0
    lines = open(path).read().splitlines()
    assert lines[0].startswith("#") and "metric=betweenness" in lines[0]
    assert any(l.startswith("V ") for l in lines)
    assert any(l.startswith("E ") for l in lines)


def test_config_file_overrides_flags(tmp_path):
    config_path = tmp_path / "cfg.json"
    config_path.write_text(json.dumps({"layout": "bottleneck", "rollouts": 3}))
    parser = build_parser()
    args = parser.parse_args(["train", *FAST, "--config", str(config_path)])
    cfg = build_config(args)
    assert cfg.layout == "bottleneck"  # file wins over the flag
    assert cfg.rollouts == 3
    assert cfg.iterations == 2  # flag value kept where the file is silent


def test_grpo_default_aggregation_is_length_normalized():
    parser = build_parser()
    cfg = build_config(parser.parse_args(["train", "--algorithm", "grpo"]))
    assert cfg.optim.aggregation == "length_norm"
    cfg = build_config(parser.parse_args(["train", "--algorithm", "gepo"]))
    assert cfg.optim.aggregation == "traj_sum"


def test_error_line_is_machine_readable(capsys):
    code = run_cli("train", "--layout", "nope", "--iterations", "1", "--seed", "1")
    assert code == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    payload = json.loads(err)
    assert payload["error"] == "ConfigError"
    assert "nope" in payload["message"]


def test_entry_point_installed():
    import subprocess

    proc = subprocess.run(["gepo", "train", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "--layout" in proc.stdout
