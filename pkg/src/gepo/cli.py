"""Command-line interface for training, evaluation, sweeps, and graph export.

Subcommands mirror the experiment harness; flags mirror ExperimentConfig
fields. Values from a JSON config file (--config) override flag values.
Failures exit nonzero after printing one machine-readable JSON error line to
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .advantage import AdvantageConfig
from .errors import GepoError
from .harness import (
    ExperimentConfig,
    ablation_suite,
    centrality_sweep,
    compare,
    init_run_state,
    rollout_sweep,
    run_experiment,
    training_iteration,
)
from .policy import OptimConfig
from .shaping import ShapingConfig
from .state_graph import maybe_refresh


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--layout", default="bottleneck")
    parser.add_argument("--algorithm", default="gepo", choices=("gepo", "grpo", "ppo"))
    parser.add_argument("--rollouts", type=int, default=16)
    parser.add_argument("--iterations", type=int, default=100)
    parser.add_argument("--seed", default="1,2,3", help="comma-separated seed list")
    parser.add_argument("--horizon", type=int, default=40)
    parser.add_argument("--w-node", type=float, default=0.1)
    parser.add_argument("--w-edge", type=float, default=0.1)
    parser.add_argument("--gamma-base", type=float, default=0.99)
    parser.add_argument("--w-gamma", type=float, default=0.1)
    parser.add_argument("--gamma-cap", type=float, default=0.999)
    parser.add_argument("--w-struct", type=float, default=0.3)
    parser.add_argument("--lambda", dest="lam", type=float, default=0.5)
    parser.add_argument("--epsilon", type=float, default=1e-8)
    parser.add_argument("--clip-epsilon", type=float, default=0.2)
    parser.add_argument("--learning-rate", type=float, default=0.05)
    parser.add_argument("--value-coeff", type=float, default=0.5)
    parser.add_argument("--entropy-coeff", type=float, default=0.01)
    parser.add_argument("--epochs", type=int, default=1)
    parser.add_argument("--aggregation", choices=("traj_sum", "length_norm"), default=None)
    parser.add_argument("--metric", default="betweenness",
                        choices=("betweenness", "degree", "closeness", "eigenvector"))
    parser.add_argument("--refresh-every", type=int, default=1)
    parser.add_argument("--refresh-growth", type=float, default=2.0)
    parser.add_argument("--provider", default="hash", choices=("hash", "identity"))
    parser.add_argument("--embed-dim", type=int, default=None)
    parser.add_argument("--merge-threshold", type=float, default=0.9)
    parser.add_argument("--disable-intrinsic", action="store_true")
    parser.add_argument("--disable-aggregation", action="store_true")
    parser.add_argument("--disable-discount", action="store_true")
    parser.add_argument("--eval-episodes", type=int, default=100)
    parser.add_argument("--out", dest="out_dir", default=None)
    parser.add_argument("--config", default=None, help="JSON file whose values override flags")


def _parse_seeds(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(s) for s in text)
    return tuple(int(s) for s in str(text).split(",") if s != "")


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {
        "layout": args.layout,
        "algorithm": args.algorithm,
        "rollouts": args.rollouts,
        "iterations": args.iterations,
        "seed": args.seed,
        "horizon": args.horizon,
        "w_node": args.w_node,
        "w_edge": args.w_edge,
        "gamma_base": args.gamma_base,
        "w_gamma": args.w_gamma,
        "gamma_cap": args.gamma_cap,
        "w_struct": args.w_struct,
        "lam": args.lam,
        "epsilon": args.epsilon,
        "clip_epsilon": args.clip_epsilon,
        "learning_rate": args.learning_rate,
        "value_coeff": args.value_coeff,
        "entropy_coeff": args.entropy_coeff,
        "epochs": args.epochs,
        "aggregation": args.aggregation,
        "metric": args.metric,
        "refresh_every": args.refresh_every,
        "refresh_growth": args.refresh_growth,
        "provider": args.provider,
        "embed_dim": args.embed_dim,
        "merge_threshold": args.merge_threshold,
        "disable_intrinsic": args.disable_intrinsic,
        "disable_aggregation": args.disable_aggregation,
        "disable_discount": args.disable_discount,
        "eval_episodes": args.eval_episodes,
        "out_dir": args.out_dir,
    }
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            values.update(json.load(fh))
    aggregation = values["aggregation"]
    if aggregation is None:
        aggregation = "length_norm" if values["algorithm"] == "grpo" else "traj_sum"
    return ExperimentConfig(
        layout=values["layout"],
        algorithm=values["algorithm"],
        rollouts=values["rollouts"],
        iterations=values["iterations"],
        seeds=_parse_seeds(values["seed"]),
        horizon=values["horizon"],
        shaping=ShapingConfig(
            w_node=values["w_node"],
            w_edge=values["w_edge"],
            gamma_base=values["gamma_base"],
            w_gamma=values["w_gamma"],
            gamma_cap=values["gamma_cap"],
        ),
        advantage=AdvantageConfig(
            w_struct=values["w_struct"], lam=values["lam"], epsilon=values["epsilon"]
        ),
        optim=OptimConfig(
            clip_epsilon=values["clip_epsilon"],
            learning_rate=values["learning_rate"],
            value_coeff=values["value_coeff"],
            entropy_coeff=values["entropy_coeff"],
            epochs_per_iter=values["epochs"],
            algorithm=values["algorithm"],
            aggregation=aggregation,
        ),
        metric=values["metric"],
        refresh_every=values["refresh_every"],
        refresh_growth=values["refresh_growth"],
        provider=values["provider"],
        embed_dim=values["embed_dim"],
        merge_threshold=values["merge_threshold"],
        disable_intrinsic=values["disable_intrinsic"],
        disable_aggregation=values["disable_aggregation"],
        disable_discount=values["disable_discount"],
        eval_episodes=values["eval_episodes"],
        out_dir=values["out_dir"],
    )


def _cmd_train(args) -> int:
    cfg = build_config(args)
    result = run_experiment(cfg)
    for record in result.runs:
        print(f"seed {record.seed}: final greedy success {record.final_eval:.3f} "
              f"nodes {record.final_nodes} edges {record.final_edges}")
    finals = result.final_evals()
    print(f"mean final greedy success: {finals.mean():.3f}")
    for name, path in sorted(result.files.items()):
        print(f"wrote {name}: {path}")
    return 0


def _cmd_eval(args) -> int:
    cfg = build_config(args)
    result = run_experiment(cfg)
    for record in result.runs:
        print(f"seed {record.seed}: greedy success over {cfg.eval_episodes} episodes = "
              f"{record.final_eval:.3f}")
    print(f"mean: {result.final_evals().mean():.3f}")
    return 0


def _cmd_compare(args) -> int:
    cfg = build_config(args)
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    results = compare(cfg, algorithms)
    for name, result in results.items():
        print(f"{name}: mean final greedy success {result.final_evals().mean():.3f}")
    return 0


def _cmd_ablate(args) -> int:
    cfg = build_config(args)
    rows, path = ablation_suite(cfg)
    for row in rows:
        print(f"{row['configuration']}: {row['success_mean']:.3f} +- {row['success_std']:.3f}")
    if path:
        print(f"wrote {path}")
    return 0


def _cmd_centrality_sweep(args) -> int:
    cfg = build_config(args)
    rows, path = centrality_sweep(cfg)
    for row in rows:
        print(f"{row['metric']}: {row['success_mean']:.3f} +- {row['success_std']:.3f}")
    if path:
        print(f"wrote {path}")
    return 0


def _cmd_rollout_sweep(args) -> int:
    cfg = build_config(args)
    n_values = [int(v) for v in args.n_values.split(",") if v != ""]
    rows, path = rollout_sweep(cfg, n_values, args.reference_n)
    for row in rows:
        print(f"n={row['n']}: success {row['success_mean']:.3f} nodes {row['nodes_mean']:.0f} "
              f"relative time {row['relative_time']:.2f}x")
    if path:
        print(f"wrote {path}")
    return 0


def _cmd_graph_export(args) -> int:
    cfg = build_config(args)
    state = init_run_state(cfg, cfg.seeds[0])
    for _ in range(cfg.iterations):
        training_iteration(state)
    scores = maybe_refresh(state.graph, state.refresh, state.iteration, cfg.metric)
    if scores.revision != state.graph.revision:
        scores = state.graph.compute_centralities(cfg.metric)
        state.graph.snapshot = scores
    document = state.graph.export_edge_list(scores)
    if args.export_path:
        with open(args.export_path, "w", encoding="utf-8") as fh:
            fh.write(document)
        print(f"wrote {args.export_path}")
    else:
        sys.stdout.write(document)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gepo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    commands = {
        "train": _cmd_train,
        "eval": _cmd_eval,
        "compare": _cmd_compare,
        "ablate": _cmd_ablate,
        "centrality-sweep": _cmd_centrality_sweep,
        "rollout-sweep": _cmd_rollout_sweep,
        "graph-export": _cmd_graph_export,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        _add_experiment_flags(p)
        p.set_defaults(fn=fn)
        if name == "compare":
            p.add_argument("--algorithms", default="gepo,grpo")
        if name == "rollout-sweep":
            p.add_argument("--n-values", default="2,4,8,16")
            p.add_argument("--reference-n", type=int, default=None)
        if name == "graph-export":
            p.add_argument("--export-path", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (GepoError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
