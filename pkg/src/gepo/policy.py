"""Tabular softmax policy, auxiliary value table, and clipped-surrogate updates.

The policy is a table of logits per (state vertex, action) with unseen
entries defaulting to 0, i.e. a uniform prior; the critic is a separate table
of state values defaulting to 0. Updates minimize a composite loss: the
negated clipped surrogate, a mean-squared value regression toward the shaped
returns, and an entropy bonus at visited states. Gradients are analytic, with
the clipped branch contributing zero policy gradient wherever the clip is the
active minimum, and are applied by plain full-batch gradient descent so runs
stay deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    EmptyGroupError,
    NumericFailureError,
    ShapeMismatchError,
)
from .trajectories import StateKey, Trajectory

ALGORITHMS = ("gepo", "grpo", "ppo")
AGGREGATIONS = ("traj_sum", "length_norm")


@dataclass
class OptimConfig:
    clip_epsilon: float = 0.2
    learning_rate: float = 0.05
    value_coeff: float = 0.5
    entropy_coeff: float = 0.01
    entropy_decay: float = 1.0  # per-iteration multiplier on entropy_coeff (1.0 = constant)
    epochs_per_iter: int = 1
    algorithm: str = "gepo"
    aggregation: str = "traj_sum"

    def __post_init__(self):
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ConfigError("clip_epsilon must lie in (0, 1)")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be non-negative")
        if not 0.0 < self.entropy_decay <= 1.0:
            raise ConfigError("entropy_decay must lie in (0, 1]")
        if self.epochs_per_iter < 1:
            raise ConfigError("epochs_per_iter must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}")
        if self.aggregation not in AGGREGATIONS:
            raise ConfigError(f"aggregation must be one of {AGGREGATIONS}")


class PolicyParams:
    """Logit and value tables keyed by state vertex; unseen entries read as 0."""

    def __init__(self, n_actions: int):
        self.n_actions = int(n_actions)
        self.logits: dict[StateKey, np.ndarray] = {}
        self.values: dict[StateKey, float] = {}

    def logits_for(self, state: StateKey) -> np.ndarray:
        row = self.logits.get(state)
        return row if row is not None else np.zeros(self.n_actions)

    def value_for(self, state: StateKey) -> float:
        return self.values.get(state, 0.0)

    def copy(self) -> PolicyParams:
        clone = PolicyParams(self.n_actions)
        clone.logits = {k: v.copy() for k, v in self.logits.items()}
        clone.values = dict(self.values)
        return clone


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    return shifted - np.log(np.exp(shifted).sum())


def action_probabilities(params: PolicyParams, state: StateKey) -> np.ndarray:
    """Max-subtracted softmax over the state's logits."""
    return np.exp(_log_softmax(params.logits_for(state)))


def action_distribution(params: PolicyParams, state: StateKey) -> tuple[np.ndarray, np.ndarray]:
    """(probabilities, log-probabilities) for one state, computed consistently."""
    log_probs = _log_softmax(params.logits_for(state))
    return np.exp(log_probs), log_probs


def action_log_prob(params: PolicyParams, state: StateKey, action: int) -> float:
    return float(_log_softmax(params.logits_for(state))[action])


def importance_ratio(params: PolicyParams, step) -> float:
    """exp(log pi_new(a|s) - log pi_old(a|s)); exactly 1 when parameters are unchanged."""
    return float(np.exp(action_log_prob(params, step.state_key, step.action) - step.old_log_prob))


def surrogate_objective(
    ratios: np.ndarray,
    advantages: np.ndarray,
    clip_epsilon: float,
    lengths: list[int] | None = None,
    aggregation: str = "traj_sum",
) -> float:
    """Clipped pessimistic surrogate over a batch of timesteps.

    Per step: min(ratio * adv, clip(ratio, 1-eps, 1+eps) * adv). Steps are
    summed per trajectory; 'traj_sum' averages those sums over trajectories,
    'length_norm' averages each trajectory's mean step value instead. With no
    lengths the batch is treated as a single trajectory.
    """
    ratios = np.asarray(ratios, dtype=float)
    advantages = np.asarray(advantages, dtype=float)
    if ratios.shape != advantages.shape:
        raise ShapeMismatchError(f"ratios {ratios.shape} != advantages {advantages.shape}")
    if lengths is None:
        lengths = [len(ratios)]
    if sum(lengths) != len(ratios):
        raise ShapeMismatchError("trajectory lengths do not cover the batch")
    terms = np.minimum(
        ratios * advantages,
        np.clip(ratios, 1.0 - clip_epsilon, 1.0 + clip_epsilon) * advantages,
    )
    weights = _step_weights(lengths, aggregation)
    return float(np.sum(weights * terms))


def _step_weights(lengths: list[int], aggregation: str) -> np.ndarray:
    """Per-step weights realizing the chosen trajectory aggregation."""
    n = len(lengths)
    if aggregation == "traj_sum":
        per_traj = [1.0 / n] * n
    elif aggregation == "length_norm":
        per_traj = [1.0 / (n * t) for t in lengths]
    else:
        raise ConfigError(f"aggregation must be one of {AGGREGATIONS}")
    return np.repeat(per_traj, lengths)


@dataclass
class AdvantagedBatch:
    """Flattened per-step data for one update, with trajectory boundaries."""

    state_keys: np.ndarray
    actions: np.ndarray
    old_log_probs: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray
    lengths: list[int]

    @classmethod
    def build(
        cls,
        trajectories: list[Trajectory],
        advantages: list[np.ndarray],
        returns: list[np.ndarray],
    ) -> AdvantagedBatch:
        if not trajectories:
            raise EmptyGroupError("cannot build a batch from zero trajectories")
        return cls(
            state_keys=np.concatenate(
                [np.array([s.state_key for s in t.steps], dtype=np.int64) for t in trajectories]
            ),
            actions=np.concatenate([t.actions() for t in trajectories]),
            old_log_probs=np.concatenate([t.old_log_probs() for t in trajectories]),
            advantages=np.concatenate([np.asarray(a, dtype=float) for a in advantages]),
            returns=np.concatenate([np.asarray(r, dtype=float) for r in returns]),
            lengths=[len(t) for t in trajectories],
        )

    def __len__(self) -> int:
        return len(self.actions)


@dataclass
class PolicyGradients:
    logit_grads: dict[StateKey, np.ndarray]
    value_grads: dict[StateKey, float]

    def norm(self) -> float:
        total = sum(float(np.sum(g * g)) for g in self.logit_grads.values())
        total += sum(g * g for g in self.value_grads.values())
        return float(np.sqrt(total))


@dataclass
class UpdateReport:
    surrogate: float
    value_loss: float
    entropy: float
    grad_norm: float
    loss_trace: list[float] = field(default_factory=list)


def composite_loss(
    params: PolicyParams, batch: AdvantagedBatch, cfg: OptimConfig
) -> tuple[float, PolicyGradients, dict[str, float]]:
    """Loss = -surrogate + c1 * value MSE - c2 * mean entropy, with analytic gradients.

    The policy gradient follows the min selection of the clip: steps where the
    clipped branch is active and smaller contribute zero. Value and entropy
    terms average over all timesteps of the batch.
    """
    if len(batch) == 0:
        raise EmptyGroupError("cannot compute a loss over an empty batch")
    n_steps = len(batch)
    uniq, inv = np.unique(batch.state_keys, return_inverse=True)
    logit_rows = np.stack([params.logits_for(k) for k in uniq])
    shifted = logit_rows - logit_rows.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    probs = np.exp(log_probs)

    step_logp = log_probs[inv, batch.actions]
    ratios = np.exp(step_logp - batch.old_log_probs)
    unclipped = ratios * batch.advantages
    clipped = np.clip(ratios, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * batch.advantages
    terms = np.minimum(unclipped, clipped)
    if not np.all(np.isfinite(terms)):
        bad = int(np.nonzero(~np.isfinite(terms))[0][0])
        raise NumericFailureError(f"non-finite surrogate term at timestep {bad}", bad)

    weights = _step_weights(batch.lengths, cfg.aggregation)
    surrogate = float(np.sum(weights * terms))

    # policy-gradient coefficient per step: d(surrogate)/d(log pi) where the
    # unclipped branch is selected, zero where the clip is active and smaller
    selected = unclipped <= clipped
    coeff = weights * ratios * batch.advantages * selected

    grad_logits = np.zeros_like(logit_rows)
    np.add.at(grad_logits, (inv, batch.actions), coeff)
    row_totals = np.zeros(len(uniq))
    np.add.at(row_totals, inv, coeff)
    grad_logits -= row_totals[:, None] * probs  # d log pi(a|s) / d logit_b = 1[a=b] - pi_b

    entropies = -(probs * log_probs).sum(axis=1)
    mean_entropy = float(entropies[inv].mean())
    visit_counts = np.zeros(len(uniq))
    np.add.at(visit_counts, inv, 1.0)
    d_entropy = -(probs * (log_probs + entropies[:, None]))
    grad_entropy = d_entropy * (visit_counts[:, None] / n_steps)

    value_rows = np.array([params.value_for(k) for k in uniq])
    residual = value_rows[inv] - batch.returns
    value_loss = float(np.mean(residual**2))
    grad_values = np.zeros(len(uniq))
    np.add.at(grad_values, inv, 2.0 * residual / n_steps)
    grad_values *= cfg.value_coeff

    loss = -surrogate + cfg.value_coeff * value_loss - cfg.entropy_coeff * mean_entropy
    if not np.isfinite(loss):
        raise NumericFailureError("non-finite composite loss", -1)

    total_logit_grad = -grad_logits - cfg.entropy_coeff * grad_entropy
    grads = PolicyGradients(
        logit_grads={int(k): total_logit_grad[i] for i, k in enumerate(uniq)},
        value_grads={int(k): float(grad_values[i]) for i, k in enumerate(uniq)},
    )
    components = {"surrogate": surrogate, "value_loss": value_loss, "entropy": mean_entropy}
    return loss, grads, components


def update_policy(
    params: PolicyParams, batch: AdvantagedBatch, cfg: OptimConfig
) -> tuple[PolicyParams, UpdateReport]:
    """Run epochs_per_iter gradient-descent passes on the composite loss.

    Old log-probabilities stay frozen at their sampling-time values, so later
    epochs see genuine importance ratios. The input params are not mutated.
    """
    new_params = params.copy()
    trace: list[float] = []
    grads = None
    components = {"surrogate": 0.0, "value_loss": 0.0, "entropy": 0.0}
    for _ in range(cfg.epochs_per_iter):
        loss, grads, components = composite_loss(new_params, batch, cfg)
        trace.append(loss)
        for key, grad in grads.logit_grads.items():
            new_params.logits[key] = new_params.logits_for(key) - cfg.learning_rate * grad
        for key, grad in grads.value_grads.items():
            new_params.values[key] = new_params.value_for(key) - cfg.learning_rate * grad
    report = UpdateReport(
        surrogate=components["surrogate"],
        value_loss=components["value_loss"],
        entropy=components["entropy"],
        grad_norm=grads.norm() if grads is not None else 0.0,
        loss_trace=trace,
    )
    return new_params, report


def discounted_returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """Plain constant-discount returns-to-go via the backward recursion."""
    rewards = np.asarray(rewards, dtype=float)
    out = np.zeros_like(rewards)
    tail = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        tail = rewards[t] + gamma * tail
        out[t] = tail
    return out


def grpo_advantages(group: list[Trajectory], gamma: float, epsilon: float = 1e-8) -> list[np.ndarray]:
    """Group-relative baseline advantages: no graph signals anywhere.

    Each trajectory's constant-discount return of extrinsic rewards is
    mean-std normalized across the group (sample std, epsilon-guarded) and
    broadcast to that trajectory's timesteps.
    """
    if not group:
        raise EmptyGroupError("cannot compute advantages for an empty group")
    heads = np.array([float(discounted_returns(t.rewards(), gamma)[0]) for t in group])
    std = float(np.std(heads, ddof=1)) if len(heads) > 1 else 0.0
    normalized = (heads - heads.mean()) / (std + epsilon)
    return [np.full(len(t), v) for t, v in zip(group, normalized)]
