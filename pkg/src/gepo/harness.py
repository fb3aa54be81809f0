"""Experiment orchestration: training loops, sweeps, evaluation, and CSV artifacts.

One training iteration samples a group of trajectories under a frozen policy
snapshot, commits them to the transition graph, refreshes centralities per
the refresh policy, turns the snapshot into shaped rewards, discounts,
returns, and unified advantages, and applies one policy update. Baseline
algorithms (grpo, ppo) share the rollout and update machinery but skip the
graph entirely. A failed iteration rolls the graph back and leaves the
policy untouched.

Every run is fully determined by (config, seed) in single-worker mode: each
rollout draws from an independently derived seed stream and the environments
are deterministic. Learning metrics therefore reproduce byte-for-byte; wall
clock timings cannot, so they go to a separate timings CSV that is excluded
from the determinism contract.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .advantage import (
    AdvantageConfig,
    broadcast_per_trajectory,
    cluster_states,
    local_advantage,
    normalize_batch,
    trajectory_advantage,
    trajectory_score,
    unified_advantage,
)
from .embeddings import EmbeddingProvider, make_provider
from .envs import DEFAULT_HORIZON, GridEnv, load_layout
from .errors import ConfigError
from .policy import (
    AdvantagedBatch,
    OptimConfig,
    PolicyParams,
    action_distribution,
    action_probabilities,
    discounted_returns,
    grpo_advantages,
    update_policy,
)
from .shaping import ShapingConfig, shape_trajectory
from .state_graph import RefreshPolicy, TransitionGraph, maybe_refresh
from .trajectories import Trajectory, TrajectoryStep

PHASES = ("rollout", "graph_update", "centrality", "advantage", "update")

METRIC_COLUMNS = (
    "kind",
    "iteration",
    "success_rate",
    "mean_return",
    "mean_shaped_return",
    "nodes",
    "edges",
    "loss",
    "surrogate",
    "value_loss",
    "entropy",
    "grad_norm",
    "greedy_success",
)

SUMMARY_COLUMNS = (
    "kind",
    "iteration",
    "success_rate_mean",
    "success_rate_std",
    "mean_return_mean",
    "mean_return_std",
    "greedy_success_mean",
    "greedy_success_std",
    "nodes_mean",
    "edges_mean",
    "loss_mean",
)


@dataclass
class ExperimentConfig:
    layout: str = "bottleneck"
    algorithm: str = "gepo"
    rollouts: int = 16
    iterations: int = 100
    seeds: tuple[int, ...] = (1, 2, 3)
    horizon: int = DEFAULT_HORIZON
    shaping: ShapingConfig = field(default_factory=ShapingConfig)
    advantage: AdvantageConfig = field(default_factory=AdvantageConfig)
    optim: OptimConfig = field(default_factory=OptimConfig)
    metric: str = "betweenness"
    refresh_every: int = 1
    refresh_growth: float = 2.0
    provider: str = "hash"
    embed_dim: int | None = None
    merge_threshold: float = 0.9
    disable_intrinsic: bool = False
    disable_aggregation: bool = False
    disable_discount: bool = False
    eval_episodes: int = 100
    out_dir: str | None = None

    def __post_init__(self):
        if self.rollouts < 1:
            raise ConfigError("rollouts must be >= 1")
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not 0.0 < self.merge_threshold <= 1.0:
            raise ConfigError("merge_threshold must lie in (0, 1]")
        if self.refresh_every < 1:
            raise ConfigError("refresh_every must be >= 1")
        if self.optim.algorithm != self.algorithm:
            self.optim = replace(self.optim, algorithm=self.algorithm)

    def effective_shaping(self) -> ShapingConfig:
        """Shaping config with ablated components replaced by their neutral values."""
        cfg = self.shaping
        w_node, w_edge = cfg.w_node, cfg.w_edge
        w_gamma = cfg.w_gamma
        if self.disable_intrinsic:
            w_node = w_edge = 0.0
        if self.disable_discount:
            w_gamma = 0.0
        return ShapingConfig(w_node, w_edge, cfg.gamma_base, w_gamma, cfg.gamma_cap)

    def effective_advantage(self) -> AdvantageConfig:
        cfg = self.advantage
        if self.disable_aggregation:
            return AdvantageConfig(w_struct=0.0, lam=0.0, epsilon=cfg.epsilon)
        return cfg

    def echo_lines(self) -> list[str]:
        """Sorted '# key=value' lines echoing the full configuration.

        out_dir is omitted: it is I/O plumbing, and identical experiments
        written to different directories must still produce byte-identical
        artifacts.
        """
        flat: dict[str, object] = {}
        for f in fields(self):
            if f.name == "out_dir":
                continue
            value = getattr(self, f.name)
            if f.name in ("shaping", "advantage", "optim"):
                for sub in fields(value):
                    flat[f"{f.name}.{sub.name}"] = getattr(value, sub.name)
            elif f.name == "seeds":
                flat[f.name] = ",".join(str(s) for s in value)
            else:
                flat[f.name] = value
        return [f"# {key}={flat[key]}" for key in sorted(flat)]


def default_config(algorithm: str = "gepo", **overrides) -> ExperimentConfig:
    """Config with the documented defaults; grpo gets length-normalized aggregation."""
    aggregation = "length_norm" if algorithm == "grpo" else "traj_sum"
    optim = overrides.pop("optim", OptimConfig(algorithm=algorithm, aggregation=aggregation))
    return ExperimentConfig(algorithm=algorithm, optim=optim, **overrides)


def benchmark_config(algorithm: str = "gepo", layout: str = "two-keys", **overrides) -> ExperimentConfig:
    """Tuned desk-scale configuration for the bottleneck benchmarks.

    The formula-level defaults (ShapingConfig, AdvantageConfig, OptimConfig)
    are deliberately conservative; this preset carries the values calibrated
    for tabular learning on the shipped layouts: lighter intrinsic weights so
    a terminal success outweighs accumulated exploration bonuses, a damping
    epsilon in the advantage normalizers so near-homogeneous groups do not
    amplify noise to full scale, and an entropy bonus scaled to the summed
    (per-trajectory) surrogate aggregation. Baselines share the aggregation
    and optimizer so comparisons isolate the graph signals.
    """
    iterations = 600 if layout == "two-keys" else 300
    optim = overrides.pop(
        "optim",
        OptimConfig(
            learning_rate=0.4,
            epochs_per_iter=8,
            entropy_coeff=7.0,
            algorithm=algorithm,
            aggregation="traj_sum",
        ),
    )
    defaults = dict(
        layout=layout,
        iterations=iterations,
        rollouts=16,
        shaping=ShapingConfig(w_node=0.05, w_edge=0.05),
        advantage=AdvantageConfig(w_struct=0.3, lam=0.5, epsilon=0.2),
        optim=optim,
    )
    defaults.update(overrides)
    return ExperimentConfig(algorithm=algorithm, **defaults)


@dataclass
class IterationMetrics:
    iteration: int
    success_rate: float
    mean_return: float
    mean_shaped_return: float
    nodes: int
    edges: int
    loss: float
    surrogate: float
    value_loss: float
    entropy: float
    grad_norm: float
    greedy_success: float
    timings: dict[str, float]

    def row(self) -> list:
        return [
            "train",
            self.iteration,
            self.success_rate,
            self.mean_return,
            self.mean_shaped_return,
            self.nodes,
            self.edges,
            self.loss,
            self.surrogate,
            self.value_loss,
            self.entropy,
            self.grad_norm,
            self.greedy_success,
        ]


@dataclass
class RunState:
    cfg: ExperimentConfig
    seed: int
    env: GridEnv
    graph: TransitionGraph
    provider: EmbeddingProvider
    params: PolicyParams
    key_index: dict[str, int]
    refresh: RefreshPolicy
    iteration: int = 0


def init_run_state(cfg: ExperimentConfig, seed: int) -> RunState:
    env = GridEnv(load_layout(cfg.layout), horizon=cfg.horizon)
    return RunState(
        cfg=cfg,
        seed=seed,
        env=env,
        graph=TransitionGraph(),
        provider=make_provider(cfg.provider, cfg.embed_dim),
        params=PolicyParams(env.action_count),
        key_index={},
        refresh=RefreshPolicy(cfg.refresh_every, cfg.refresh_growth),
    )


# -- rollouts ----------------------------------------------------------------


def _rollout_rng(seed: int, iteration: int, rollout: int) -> np.random.Generator:
    # independent stream per rollout so worker completion order cannot matter
    return np.random.default_rng(np.random.SeedSequence([seed, iteration, rollout]))


def _sample_action(rng: np.random.Generator, probs: np.ndarray) -> int:
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    return min(idx, len(probs) - 1)


def sample_trajectory(
    env: GridEnv, params: PolicyParams, resolve, rng, dist_cache: dict | None = None
) -> Trajectory:
    """Run one episode under the current policy, recording sampling-time log-probs.

    ``dist_cache`` may memoize per-state distributions for the duration of one
    frozen-policy rollout phase.
    """
    observation = env.reset()
    key = resolve(observation)
    steps: list[TrajectoryStep] = []
    if dist_cache is None:
        dist_cache = {}
    while True:
        cached = dist_cache.get(key)
        if cached is None:
            probs, log_probs = action_distribution(params, key)
            cached = (np.cumsum(probs), log_probs)
            dist_cache[key] = cached
        cum, log_probs = cached
        action = min(int(np.searchsorted(cum, rng.random(), side="right")), len(cum) - 1)
        outcome = env.step(action)
        steps.append(
            TrajectoryStep(observation, key, action, outcome.reward, float(log_probs[action]))
        )
        next_key = resolve(outcome.observation)
        if outcome.terminal:
            return Trajectory(steps, outcome.observation, next_key)
        observation, key = outcome.observation, next_key


def _index_resolver(index: dict[str, int]):
    def resolve(text: str) -> int:
        key = index.get(text)
        if key is None:
            key = len(index)
            index[text] = key
        return key

    return resolve


def _greedy_lookup(state: RunState):
    if state.cfg.algorithm == "gepo":
        graph, provider, threshold = state.graph, state.provider, state.cfg.merge_threshold
        return lambda text: graph.lookup_state(text, provider, threshold)
    return state.key_index.get


def greedy_episode(env: GridEnv, params: PolicyParams, lookup) -> bool:
    """One argmax-policy episode; unseen observations fall back to the uniform prior."""
    observation = env.reset()
    while True:
        key = lookup(observation)
        probs = action_probabilities(params, key) if key is not None else None
        action = int(np.argmax(probs)) if probs is not None else 0
        outcome = env.step(action)
        if outcome.terminal:
            return outcome.success
        observation = outcome.observation


def evaluate_greedy(state: RunState, episodes: int) -> float:
    lookup = _greedy_lookup(state)
    wins = sum(greedy_episode(state.env, state.params, lookup) for _ in range(episodes))
    return wins / episodes


# -- training ------------------------------------------------------------------


def training_iteration(state: RunState) -> IterationMetrics:
    """One full pass: sample, grow the graph, shape, estimate advantages, update.

    Raises whatever the phases raise; on error the graph and parameters are
    restored to their pre-iteration values.
    """
    cfg = state.cfg
    marks = [time.perf_counter()]
    if cfg.algorithm == "gepo":
        group, shaped, new_params, report = _gepo_iteration(state, marks)
    else:
        group, shaped, new_params, report = _baseline_iteration(state, marks)
    state.params = new_params
    state.iteration += 1

    timings = {phase: marks[i + 1] - marks[i] for i, phase in enumerate(PHASES)}
    timings["total"] = marks[-1] - marks[0]
    successes = [1.0 if t.total_reward() > 0 else 0.0 for t in group]
    shaped_totals = (
        [float(np.sum(s.shaped_rewards)) for s in shaped]
        if shaped is not None
        else [t.total_reward() for t in group]
    )
    return IterationMetrics(
        iteration=state.iteration - 1,
        success_rate=float(np.mean(successes)),
        mean_return=float(np.mean([t.total_reward() for t in group])),
        mean_shaped_return=float(np.mean(shaped_totals)),
        nodes=state.graph.num_vertices,
        edges=state.graph.num_edges,
        loss=report.loss_trace[-1],
        surrogate=report.surrogate,
        value_loss=report.value_loss,
        entropy=report.entropy,
        grad_norm=report.grad_norm,
        greedy_success=evaluate_greedy(state, episodes=1),
        timings=timings,
    )


def _effective_optim(state: RunState) -> OptimConfig:
    optim = state.cfg.optim
    if optim.entropy_decay >= 1.0:
        return optim
    scaled = optim.entropy_coeff * optim.entropy_decay**state.iteration
    return replace(optim, entropy_coeff=scaled)


def _gepo_iteration(state: RunState, marks: list[float]):
    cfg = state.cfg
    shaping_cfg = cfg.effective_shaping()
    adv_cfg = cfg.effective_advantage()
    txn = state.graph.transaction(state.provider, cfg.merge_threshold)
    dist_cache: dict = {}
    group = [
        sample_trajectory(
            state.env, state.params, txn.resolve,
            _rollout_rng(state.seed, state.iteration, k), dist_cache,
        )
        for k in range(cfg.rollouts)
    ]
    marks.append(time.perf_counter())  # rollout

    snapshot_before = state.graph.snapshot
    receipt = txn.commit(group)
    marks.append(time.perf_counter())  # graph_update
    try:
        scores = maybe_refresh(state.graph, state.refresh, state.iteration, cfg.metric)
        marks.append(time.perf_counter())  # centrality

        shaped = [shape_trajectory(t, scores, shaping_cfg) for t in group]
        lengths = [len(t) for t in group]
        t_scores = [trajectory_score(s, scores, adv_cfg) for s in shaped]
        traj_adv = trajectory_advantage(t_scores, adv_cfg)
        returns = [s.returns for s in shaped]
        local_adv = local_advantage(cluster_states(shaped), returns, scores, adv_cfg)
        unified = unified_advantage(
            broadcast_per_trajectory(traj_adv, lengths),
            np.concatenate(local_adv),
            adv_cfg,
        )
        per_traj = np.split(unified, np.cumsum(lengths)[:-1])
        batch = AdvantagedBatch.build(group, list(per_traj), returns)
        marks.append(time.perf_counter())  # advantage

        new_params, report = update_policy(state.params, batch, _effective_optim(state))
        marks.append(time.perf_counter())  # update
    except Exception:
        state.graph.rollback(receipt)
        state.graph.snapshot = snapshot_before
        raise
    return group, shaped, new_params, report


def _baseline_iteration(state: RunState, marks: list[float]):
    cfg = state.cfg
    resolve = _index_resolver(state.key_index)
    dist_cache: dict = {}
    group = [
        sample_trajectory(
            state.env, state.params, resolve,
            _rollout_rng(state.seed, state.iteration, k), dist_cache,
        )
        for k in range(cfg.rollouts)
    ]
    marks.append(time.perf_counter())  # rollout
    marks.append(time.perf_counter())  # graph_update (none)
    marks.append(time.perf_counter())  # centrality (none)

    gamma = cfg.shaping.gamma_base
    returns = [discounted_returns(t.rewards(), gamma) for t in group]
    if cfg.algorithm == "grpo":
        broadcast = grpo_advantages(group, gamma, cfg.advantage.epsilon)
        flat = normalize_batch(np.concatenate(broadcast), cfg.advantage.epsilon)
        lengths = [len(t) for t in group]
        advantages = list(np.split(flat, np.cumsum(lengths)[:-1]))
    else:  # ppo: per-step residual against the frozen critic
        advantages = [
            ret - np.array([state.params.value_for(s.state_key) for s in t.steps])
            for t, ret in zip(group, returns)
        ]
    batch = AdvantagedBatch.build(group, advantages, returns)
    marks.append(time.perf_counter())  # advantage

    new_params, report = update_policy(state.params, batch, _effective_optim(state))
    marks.append(time.perf_counter())  # update
    return group, None, new_params, report


# -- experiments ----------------------------------------------------------------


@dataclass
class RunRecord:
    seed: int
    metrics: list[IterationMetrics]
    final_eval: float
    final_nodes: int
    final_edges: int
    wall_time: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list[RunRecord]
    files: dict[str, str] = field(default_factory=dict)

    def final_evals(self) -> np.ndarray:
        return np.array([r.final_eval for r in self.runs])


def run_seed(cfg: ExperimentConfig, seed: int) -> RunRecord:
    state = init_run_state(cfg, seed)
    start = time.perf_counter()
    metrics = [training_iteration(state) for _ in range(cfg.iterations)]
    final_eval = evaluate_greedy(state, cfg.eval_episodes)
    return RunRecord(
        seed=seed,
        metrics=metrics,
        final_eval=final_eval,
        final_nodes=state.graph.num_vertices,
        final_edges=state.graph.num_edges,
        wall_time=time.perf_counter() - start,
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Train each seed from a fresh run state, then greedily evaluate and write CSVs."""
    result = ExperimentResult(cfg, [run_seed(cfg, seed) for seed in cfg.seeds])
    if cfg.out_dir:
        result.files = write_experiment_files(cfg, result)
    return result


# -- artifacts --------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _write_rows(path: str, header_lines: list[str], columns: tuple[str, ...], rows: list[list]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def metrics_rows(record: RunRecord, cfg: ExperimentConfig) -> list[list]:
    rows = [m.row() for m in record.metrics]
    rows.append(
        [
            "eval",
            cfg.iterations,
            record.final_eval,
            record.final_eval,
            0.0,
            record.final_nodes,
            record.final_edges,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            record.final_eval,
        ]
    )
    return rows


def write_experiment_files(cfg: ExperimentConfig, result: ExperimentResult) -> dict[str, str]:
    files: dict[str, str] = {}
    header = cfg.echo_lines()
    for record in result.runs:
        path = os.path.join(cfg.out_dir, f"metrics_seed{record.seed}.csv")
        _write_rows(path, header, METRIC_COLUMNS, metrics_rows(record, cfg))
        files[f"metrics_seed{record.seed}"] = path

        tpath = os.path.join(cfg.out_dir, f"timings_seed{record.seed}.csv")
        trows = [
            [m.iteration] + [m.timings[p] for p in PHASES] + [m.timings["total"]]
            for m in record.metrics
        ]
        _write_rows(tpath, header, ("iteration", *PHASES, "total"), trows)
        files[f"timings_seed{record.seed}"] = tpath

    spath = os.path.join(cfg.out_dir, "summary.csv")
    _write_rows(spath, header, SUMMARY_COLUMNS, summary_rows(cfg, result))
    files["summary"] = spath
    return files


def _mean_std(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return mean, std


def summary_rows(cfg: ExperimentConfig, result: ExperimentResult) -> list[list]:
    """Per-iteration cross-seed mean and sample std, plus one final eval row."""
    rows = []
    for i in range(cfg.iterations):
        per_seed = [run.metrics[i] for run in result.runs]
        sr_m, sr_s = _mean_std(np.array([m.success_rate for m in per_seed]))
        mr_m, mr_s = _mean_std(np.array([m.mean_return for m in per_seed]))
        gs_m, gs_s = _mean_std(np.array([m.greedy_success for m in per_seed]))
        rows.append(
            [
                "train",
                i,
                sr_m,
                sr_s,
                mr_m,
                mr_s,
                gs_m,
                gs_s,
                float(np.mean([m.nodes for m in per_seed])),
                float(np.mean([m.edges for m in per_seed])),
                float(np.mean([m.loss for m in per_seed])),
            ]
        )
    ev_m, ev_s = _mean_std(result.final_evals())
    rows.append(
        [
            "eval",
            cfg.iterations,
            ev_m,
            ev_s,
            ev_m,
            ev_s,
            ev_m,
            ev_s,
            float(np.mean([r.final_nodes for r in result.runs])),
            float(np.mean([r.final_edges for r in result.runs])),
            0.0,
        ]
    )
    return rows


# -- suites ------------------------------------------------------------------------


ABLATION_VARIANTS = (
    ("full", ()),
    ("no_intrinsic", ("disable_intrinsic",)),
    ("no_aggregation", ("disable_aggregation",)),
    ("no_discount", ("disable_discount",)),
    ("no_aggregation_discount", ("disable_aggregation", "disable_discount")),
    ("no_intrinsic_discount", ("disable_intrinsic", "disable_discount")),
    ("no_intrinsic_aggregation", ("disable_intrinsic", "disable_aggregation")),
)


def ablation_suite(cfg: ExperimentConfig) -> tuple[list[dict], str | None]:
    """Full model, the three single-component ablations, and the three pairwise ones."""
    rows = []
    for name, switches in ABLATION_VARIANTS:
        variant = replace(cfg, **{s: True for s in switches}, out_dir=None)
        result = run_experiment(variant)
        finals = result.final_evals()
        mean, std = _mean_std(finals)
        rows.append(
            {
                "configuration": name,
                "success_mean": mean,
                "success_std": std,
                "success_median": float(np.median(finals)),
            }
        )
    path = None
    if cfg.out_dir:
        path = os.path.join(cfg.out_dir, "ablation.csv")
        _write_rows(
            path,
            cfg.echo_lines(),
            ("configuration", "success_mean", "success_std", "success_median"),
            [[r["configuration"], r["success_mean"], r["success_std"], r["success_median"]] for r in rows],
        )
    return rows, path


CENTRALITY_METRICS = ("betweenness", "eigenvector", "closeness", "degree")


def centrality_sweep(cfg: ExperimentConfig) -> tuple[list[dict], str | None]:
    """The four node-centrality metrics under otherwise identical configs and seeds."""
    rows = []
    for metric in CENTRALITY_METRICS:
        result = run_experiment(replace(cfg, metric=metric, out_dir=None))
        finals = result.final_evals()
        mean, std = _mean_std(finals)
        rows.append(
            {
                "metric": metric,
                "success_mean": mean,
                "success_std": std,
                "success_median": float(np.median(finals)),
            }
        )
    path = None
    if cfg.out_dir:
        path = os.path.join(cfg.out_dir, "centrality_sweep.csv")
        _write_rows(
            path,
            cfg.echo_lines(),
            ("metric", "success_mean", "success_std", "success_median"),
            [[r["metric"], r["success_mean"], r["success_std"], r["success_median"]] for r in rows],
        )
    return rows, path


def rollout_sweep(
    cfg: ExperimentConfig, n_values: list[int], reference_n: int | None = None
) -> tuple[list[dict], str | None]:
    """Group-size sweep reporting success, final graph size, and relative wall time."""
    if not n_values:
        raise ConfigError("n_values must be non-empty")
    if reference_n is None:
        reference_n = 8 if 8 in n_values else n_values[0]
    if reference_n not in n_values:
        raise ConfigError("reference_n must appear in n_values")
    rows = []
    times: dict[int, float] = {}
    for n in n_values:
        result = run_experiment(replace(cfg, rollouts=n, out_dir=None))
        finals = result.final_evals()
        mean, std = _mean_std(finals)
        times[n] = float(np.mean([r.wall_time for r in result.runs]))
        rows.append(
            {
                "n": n,
                "success_mean": mean,
                "success_std": std,
                "nodes_mean": float(np.mean([r.final_nodes for r in result.runs])),
                "edges_mean": float(np.mean([r.final_edges for r in result.runs])),
                "wall_time": times[n],
            }
        )
    for row in rows:
        row["relative_time"] = row["wall_time"] / times[reference_n]
    path = None
    if cfg.out_dir:
        path = os.path.join(cfg.out_dir, "rollout_sweep.csv")
        columns = ("n", "success_mean", "success_std", "nodes_mean", "edges_mean", "relative_time")
        _write_rows(path, cfg.echo_lines(), columns, [[r[c] for c in columns] for r in rows])
    return rows, path


def compare(cfg: ExperimentConfig, algorithms: list[str]) -> dict[str, ExperimentResult]:
    """Run several algorithms over identical seeds and write per-algorithm artifacts."""
    results = {}
    for algorithm in algorithms:
        out = os.path.join(cfg.out_dir, algorithm) if cfg.out_dir else None
        aggregation = "length_norm" if algorithm == "grpo" else "traj_sum"
        variant = replace(
            cfg,
            algorithm=algorithm,
            optim=replace(cfg.optim, algorithm=algorithm, aggregation=aggregation),
            out_dir=out,
        )
        results[algorithm] = run_experiment(variant)
    return results
