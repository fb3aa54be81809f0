"""Centrality-derived reward, discount, and return shaping.

Each transition earns a dense intrinsic bonus from the centrality of the
state it enters and of the edge it traverses; the per-step discount factor
stretches when the agent moves toward more central (more pivotal) states and
shrinks when it moves away. Returns are then the usual discounted sums, but
under these per-step discounts and shaped rewards. All functions here are
pure over an immutable centrality snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .centrality import CentralityScores
from .errors import ConfigError, ShapeMismatchError
from .trajectories import StateKey, Trajectory


@dataclass
class ShapingConfig:
    w_node: float = 0.1
    w_edge: float = 0.1
    gamma_base: float = 0.99
    w_gamma: float = 0.1
    gamma_cap: float = 0.999

    def __post_init__(self):
        if self.w_node < 0 or self.w_edge < 0 or self.w_gamma < 0:
            raise ConfigError("shaping weights must be non-negative")
        if not 0.0 <= self.gamma_base < 1.0:
            raise ConfigError("gamma_base must lie in [0, 1)")
        if not self.gamma_base < self.gamma_cap <= 0.999:
            raise ConfigError("gamma_cap must satisfy gamma_base < gamma_cap <= 0.999")


@dataclass
class ShapedTrajectory:
    """A trajectory annotated with per-step shaping signals (all arrays length T)."""

    base: Trajectory
    intrinsic_rewards: np.ndarray
    shaped_rewards: np.ndarray
    discounts: np.ndarray
    returns: np.ndarray

    def __len__(self) -> int:
        return len(self.base)


def intrinsic_reward(
    scores: CentralityScores, src: StateKey, dst: StateKey, cfg: ShapingConfig
) -> float:
    """Bonus for entering ``dst`` via the edge (src, dst): weighted node plus edge centrality.

    Entities missing from the snapshot contribute 0.
    """
    return cfg.w_node * scores.node(dst) + cfg.w_edge * scores.edge(src, dst)


def shape_rewards(
    trajectory: Trajectory, scores: CentralityScores, cfg: ShapingConfig
) -> np.ndarray:
    """Extrinsic rewards plus the per-transition intrinsic bonus, elementwise."""
    keys = trajectory.state_keys
    bonus = np.array(
        [intrinsic_reward(scores, src, dst, cfg) for src, dst in zip(keys, keys[1:])]
    )
    return trajectory.rewards() + bonus


def dynamic_discount(
    scores: CentralityScores, src: StateKey, dst: StateKey, cfg: ShapingConfig
) -> float:
    """Per-step discount stretched by the centrality gain of the transition.

    gamma_base is scaled by 1 + w_gamma * tanh(C(dst) - C(src)) and clipped to
    [0, gamma_cap], so the agent plans farther ahead exactly when it is moving
    into more pivotal territory.
    """
    delta = scores.node(dst) - scores.node(src)
    return float(np.clip(cfg.gamma_base * (1.0 + cfg.w_gamma * np.tanh(delta)), 0.0, cfg.gamma_cap))


def compute_returns(shaped_rewards: np.ndarray, discounts: np.ndarray) -> np.ndarray:
    """Discounted returns under per-step discounts, via the backward recursion.

    G[t] = r[t] + gamma[t] * G[t+1] with G past the final step defined as 0,
    which equals the explicit sum of rewards weighted by running discount
    products.
    """
    shaped_rewards = np.asarray(shaped_rewards, dtype=float)
    discounts = np.asarray(discounts, dtype=float)
    if shaped_rewards.shape != discounts.shape:
        raise ShapeMismatchError(
            f"rewards length {shaped_rewards.shape} != discounts length {discounts.shape}"
        )
    returns = np.zeros_like(shaped_rewards)
    tail = 0.0
    for t in range(len(shaped_rewards) - 1, -1, -1):
        tail = shaped_rewards[t] + discounts[t] * tail
        returns[t] = tail
    return returns


def shape_trajectory(
    trajectory: Trajectory, scores: CentralityScores, cfg: ShapingConfig
) -> ShapedTrajectory:
    """Annotate one trajectory with intrinsic rewards, discounts, and returns."""
    keys = trajectory.state_keys
    intrinsic = np.array(
        [intrinsic_reward(scores, src, dst, cfg) for src, dst in zip(keys, keys[1:])]
    )
    shaped = trajectory.rewards() + intrinsic
    discounts = np.array(
        [dynamic_discount(scores, src, dst, cfg) for src, dst in zip(keys, keys[1:])]
    )
    return ShapedTrajectory(trajectory, intrinsic, shaped, discounts, compute_returns(shaped, discounts))
