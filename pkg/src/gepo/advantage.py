"""Two-level advantage estimation for a group of shaped trajectories.

A trajectory's score is its shaped return from the first step plus a weighted
average of the centralities it visited, normalized against the group to give
a holistic, trajectory-level advantage. Orthogonally, timesteps that share a
state vertex are clustered, their returns z-scored within the cluster, and
scaled up at pivotal (high-centrality) states. The unified advantage
interpolates between the two after re-normalizing each across the batch, so
neither signal dominates by scale alone.

Degenerate statistics resolve to zero rather than erroring: a singleton group
or cluster, or an all-equal one, carries no comparative information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .centrality import CentralityScores
from .errors import ConfigError, EmptyGroupError, ShapeMismatchError
from .shaping import ShapedTrajectory
from .trajectories import StateKey


@dataclass
class AdvantageConfig:
    w_struct: float = 0.3
    lam: float = 0.5
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.w_struct < 0:
            raise ConfigError("w_struct must be non-negative")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError("lam must lie in [0, 1]")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")


@dataclass
class TrajectoryScore:
    """Trajectory score z = return_head + w_struct * structural."""

    z: float
    return_head: float
    structural: float


def trajectory_score(
    shaped: ShapedTrajectory, scores: CentralityScores, cfg: AdvantageConfig
) -> TrajectoryScore:
    """Score a trajectory by its shaped return plus its average visited centrality.

    The structural term averages node centrality over all T+1 visited states,
    terminal state included, so it is bounded by the maximum node score.
    """
    keys = shaped.base.state_keys
    structural = float(np.mean([scores.node(k) for k in keys]))
    head = float(shaped.returns[0])
    return TrajectoryScore(head + cfg.w_struct * structural, head, structural)


def _sample_std(values: np.ndarray) -> float:
    if values.size <= 1:
        return 0.0
    return float(np.std(values, ddof=1))


def normalize_batch(values: np.ndarray, epsilon: float) -> np.ndarray:
    """Mean-std normalization with sample std and an epsilon guard.

    All-equal inputs (std 0) map to exact zeros since the numerator vanishes.
    """
    values = np.asarray(values, dtype=float)
    return (values - values.mean()) / (_sample_std(values) + epsilon)


def trajectory_advantage(
    scores_in_group: list[TrajectoryScore], cfg: AdvantageConfig
) -> np.ndarray:
    """Group mean-std normalization of trajectory scores (one value per trajectory)."""
    if not scores_in_group:
        raise EmptyGroupError("cannot normalize an empty trajectory group")
    return normalize_batch(np.array([s.z for s in scores_in_group]), cfg.epsilon)


def cluster_states(
    group: list[ShapedTrajectory],
) -> dict[StateKey, list[tuple[int, int]]]:
    """Partition every (trajectory, timestep) pair by the state vertex acted from."""
    clusters: dict[StateKey, list[tuple[int, int]]] = {}
    for i, shaped in enumerate(group):
        for t, step in enumerate(shaped.base.steps):
            clusters.setdefault(step.state_key, []).append((i, t))
    return clusters


def local_advantage(
    clusters: dict[StateKey, list[tuple[int, int]]],
    returns: list[np.ndarray],
    scores: CentralityScores,
    cfg: AdvantageConfig,
) -> list[np.ndarray]:
    """Within-cluster z-scores of returns, scaled by 1 + the cluster's node centrality.

    Output arrays align with ``returns`` (one per trajectory). Singleton
    clusters yield 0: a lone visit has nothing to be compared against.
    """
    out = [np.zeros_like(r) for r in returns]
    for key, members in clusters.items():
        values = np.array([returns[i][t] for i, t in members])
        z = normalize_batch(values, cfg.epsilon)
        scale = 1.0 + scores.node(key)
        for (i, t), v in zip(members, z):
            out[i][t] = scale * v
    return out


def unified_advantage(
    traj_adv: np.ndarray, local_adv: np.ndarray, cfg: AdvantageConfig
) -> np.ndarray:
    """Interpolate batch-normalized trajectory and local advantages.

    Both inputs are flat per-timestep arrays over the whole batch (trajectory
    advantages already broadcast to their timesteps). Each is independently
    re-normalized to zero mean and unit sample variance before mixing with
    weight lam on the local signal.
    """
    traj_adv = np.asarray(traj_adv, dtype=float)
    local_adv = np.asarray(local_adv, dtype=float)
    if traj_adv.shape != local_adv.shape:
        raise ShapeMismatchError(
            f"trajectory advantages {traj_adv.shape} != local advantages {local_adv.shape}"
        )
    traj_n = normalize_batch(traj_adv, cfg.epsilon)
    local_n = normalize_batch(local_adv, cfg.epsilon)
    return (1.0 - cfg.lam) * traj_n + cfg.lam * local_n


def broadcast_per_trajectory(values: np.ndarray, lengths: list[int]) -> np.ndarray:
    """Repeat one value per trajectory across that trajectory's timesteps."""
    if len(values) != len(lengths):
        raise ShapeMismatchError("one value per trajectory required")
    return np.repeat(np.asarray(values, dtype=float), lengths)
