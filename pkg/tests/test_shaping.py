import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gepo.centrality import CentralityScores
from gepo.errors import ConfigError, ShapeMismatchError
from gepo.shaping import (
    ShapingConfig,
    compute_returns,
    dynamic_discount,
    intrinsic_reward,
    shape_rewards,
    shape_trajectory,
)
from gepo.trajectories import Trajectory, TrajectoryStep

from .oracles import constant_discount_returns, product_sum_returns


def scores_with(nodes=None, edges=None):
    return CentralityScores("betweenness", 0, len(nodes or {}), nodes or {}, edges or {})


def trajectory_from(keys, rewards):
    steps = [TrajectoryStep(f"o{k}", k, 0, r, -1.0) for k, r in zip(keys[:-1], rewards)]
    return Trajectory(steps, f"o{keys[-1]}", keys[-1])


def test_zero_weights_zero_bonus():
    cfg = ShapingConfig(w_node=0.0, w_edge=0.0)
    scores = scores_with({1: 0.9}, {(0, 1): 0.9})
    assert intrinsic_reward(scores, 0, 1, cfg) == 0.0


def test_intrinsic_reward_default_weights():
    cfg = ShapingConfig(w_node=0.1, w_edge=0.1)
    scores = scores_with({1: 0.5}, {(0, 1): 0.25})
    assert intrinsic_reward(scores, 0, 1, cfg) == pytest.approx(0.075, abs=1e-9)


def test_intrinsic_missing_edge_counts_zero():
    cfg = ShapingConfig(w_node=0.1, w_edge=0.1)
    scores = scores_with({1: 0.5})
    assert intrinsic_reward(scores, 0, 1, cfg) == pytest.approx(0.05, abs=1e-9)


def test_shape_rewards_all_zero_centrality():
    cfg = ShapingConfig()
    trajectory = trajectory_from([0, 1, 2, 3], [0.0, 0.5, 1.0])
    shaped = shape_rewards(trajectory, scores_with(), cfg)
    assert np.allclose(shaped, [0.0, 0.5, 1.0])


def test_shape_rewards_elementwise_sum():
    cfg = ShapingConfig(w_node=0.1, w_edge=0.1)
    scores = scores_with({1: 0.5, 2: 0.5}, {(0, 1): 0.0, (1, 2): 0.25})
    trajectory = trajectory_from([0, 1, 2, 3], [0.0, 0.0, 1.0])
    shaped = shape_rewards(trajectory, scores, cfg)
    assert shaped == pytest.approx([0.05, 0.075, 1.0], abs=1e-9)


def test_dynamic_discount_neutral_at_zero_delta():
    cfg = ShapingConfig(gamma_base=0.99, w_gamma=0.1)
    assert dynamic_discount(scores_with({0: 0.3, 1: 0.3}), 0, 1, cfg) == pytest.approx(0.99, abs=1e-12)


def test_dynamic_discount_clips_at_cap():
    cfg = ShapingConfig(gamma_base=0.99, w_gamma=0.5)
    scores = scores_with({0: 0.0, 1: 1e9})  # tanh saturates to 1
    assert dynamic_discount(scores, 0, 1, cfg) == pytest.approx(0.999, abs=1e-12)


def test_dynamic_discount_negative_delta():
    cfg = ShapingConfig(gamma_base=0.99, w_gamma=0.1)
    scores = scores_with({0: 0.5, 1: 0.0})
    assert dynamic_discount(scores, 0, 1, cfg) == pytest.approx(0.9442504014312589, abs=1e-9)


def test_returns_single_step():
    assert compute_returns([1.0], [0.5]) == pytest.approx([1.0])


def test_returns_two_step_example():
    returns = compute_returns([0.0, 1.0], [0.99, 0.97])
    assert returns == pytest.approx([0.99, 1.0], abs=1e-12)


def test_returns_zero_rewards():
    assert np.all(compute_returns(np.zeros(10), np.full(10, 0.99)) == 0.0)


def test_returns_length_mismatch():
    with pytest.raises(ShapeMismatchError):
        compute_returns([1.0, 2.0], [0.9])


def test_returns_match_product_sum_on_random_inputs():
    rng = np.random.default_rng(42)
    for _ in range(30):
        T = int(rng.integers(1, 51))
        rewards = rng.normal(size=T)
        discounts = rng.uniform(0, 0.999, size=T)
        assert np.allclose(
            compute_returns(rewards, discounts),
            product_sum_returns(rewards, discounts),
            atol=1e-12,
        )


def test_degenerate_config_recovers_constant_discount():
    cfg = ShapingConfig(w_node=0.0, w_edge=0.0, gamma_base=0.99, w_gamma=0.0)
    scores = scores_with({k: 0.4 for k in range(5)}, {(k, k + 1): 0.2 for k in range(4)})
    rewards = [0.0, 0.3, 0.0, 1.0]
    shaped = shape_trajectory(trajectory_from(list(range(5)), rewards), scores, cfg)
    assert np.allclose(shaped.returns, constant_discount_returns(rewards, 0.99), atol=1e-12)
    assert np.allclose(shaped.discounts, 0.99)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(min_value=-1e308, max_value=1e308, allow_nan=False),
    st.floats(min_value=-1e308, max_value=1e308, allow_nan=False),
    st.floats(min_value=0.0, max_value=0.9989),
    st.floats(min_value=0.0, max_value=100.0),
)
def test_discount_always_in_bounds(c_from, c_to, gamma_base, w_gamma):
    cfg = ShapingConfig(gamma_base=gamma_base, w_gamma=w_gamma)
    value = dynamic_discount(scores_with({0: c_from, 1: c_to}), 0, 1, cfg)
    assert 0.0 <= value <= 0.999


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_discount_monotone_in_destination_centrality(lo, hi):
    lo, hi = sorted((lo, hi))
    cfg = ShapingConfig(gamma_base=0.95, w_gamma=0.3)
    base = {0: 0.5}
    g_lo = dynamic_discount(scores_with({**base, 1: lo}), 0, 1, cfg)
    g_hi = dynamic_discount(scores_with({**base, 1: hi}), 0, 1, cfg)
    assert g_hi >= g_lo


def test_shaping_bound_with_normalized_scores():
    rng = np.random.default_rng(5)
    cfg = ShapingConfig(w_node=0.1, w_edge=0.1)
    keys = list(range(10))
    scores = scores_with(
        {k: rng.uniform(0, 1) for k in keys},
        {(k, k + 1): rng.uniform(0, 1) for k in keys[:-1]},
    )
    trajectory = trajectory_from(keys, list(rng.normal(size=9)))
    shaped = shape_rewards(trajectory, scores, cfg)
    assert np.all(np.abs(shaped - trajectory.rewards()) <= cfg.w_node + cfg.w_edge + 1e-12)


def test_config_validation():
    with pytest.raises(ConfigError):
        ShapingConfig(gamma_base=1.0)
    with pytest.raises(ConfigError):
        ShapingConfig(gamma_cap=1.5)
    with pytest.raises(ConfigError):
        ShapingConfig(w_node=-0.1)


def test_shape_trajectory_invariants():
    cfg = ShapingConfig()
    rng = np.random.default_rng(11)
    keys = list(range(6))
    scores = scores_with({k: rng.uniform(0, 1) for k in keys})
    shaped = shape_trajectory(trajectory_from(keys, list(rng.normal(size=5))), scores, cfg)
    T = 5
    assert len(shaped.intrinsic_rewards) == T
    assert len(shaped.shaped_rewards) == T
    assert len(shaped.discounts) == T
    assert len(shaped.returns) == T
    # backward recursion consistency
    for t in range(T - 1):
        assert shaped.returns[t] == pytest.approx(
            shaped.shaped_rewards[t] + shaped.discounts[t] * shaped.returns[t + 1], abs=1e-12
        )
