"""Episode records shared by the graph, shaping, and optimization layers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

StateKey = int


@dataclass(frozen=True)
class TrajectoryStep:
    """One environment interaction: the state acted from, the action, and its outcome."""

    observation: str
    state_key: StateKey
    action: int
    reward: float
    old_log_prob: float


@dataclass
class Trajectory:
    """An episode of T steps plus the terminal observation it ended in."""

    steps: list[TrajectoryStep]
    final_observation: str
    final_state_key: StateKey

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def state_keys(self) -> list[StateKey]:
        """Visited vertex keys s_0..s_T (length T+1, includes the terminal state)."""
        return [step.state_key for step in self.steps] + [self.final_state_key]

    def rewards(self) -> np.ndarray:
        return np.array([step.reward for step in self.steps], dtype=float)

    def old_log_probs(self) -> np.ndarray:
        return np.array([step.old_log_prob for step in self.steps], dtype=float)

    def actions(self) -> np.ndarray:
        return np.array([step.action for step in self.steps], dtype=np.int64)

    def total_reward(self) -> float:
        return float(sum(step.reward for step in self.steps))
