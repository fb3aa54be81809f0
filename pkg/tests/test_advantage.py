import numpy as np
import pytest

from gepo.advantage import (
    AdvantageConfig,
    broadcast_per_trajectory,
    cluster_states,
    local_advantage,
    normalize_batch,
    trajectory_advantage,
    trajectory_score,
    unified_advantage,
    TrajectoryScore,
)
from gepo.centrality import CentralityScores
from gepo.errors import ConfigError, EmptyGroupError, ShapeMismatchError
from gepo.shaping import ShapedTrajectory, ShapingConfig, shape_trajectory
from gepo.trajectories import Trajectory, TrajectoryStep


def scores_with(nodes=None):
    return CentralityScores("betweenness", 0, len(nodes or {}), nodes or {}, {})


def shaped_from(keys, rewards, scores=None, cfg=None):
    steps = [TrajectoryStep(f"o{k}", k, 0, r, -1.0) for k, r in zip(keys[:-1], rewards)]
    trajectory = Trajectory(steps, f"o{keys[-1]}", keys[-1])
    return shape_trajectory(trajectory, scores or scores_with(), cfg or ShapingConfig())


def test_score_reduces_to_return_without_structural_weight():
    shaped = shaped_from([0, 1, 2], [0.0, 1.0])
    score = trajectory_score(shaped, scores_with({0: 0.4, 1: 0.2}), AdvantageConfig(w_struct=0.0))
    assert score.z == score.return_head


def test_score_hand_example():
    # return head 1.0, visited centralities average 0.3, weight 0.5 -> 1.15
    shaped = shaped_from([0, 1], [1.0], scores=scores_with(), cfg=ShapingConfig(w_node=0, w_edge=0))
    score = trajectory_score(shaped, scores_with({0: 0.2, 1: 0.4}), AdvantageConfig(w_struct=0.5))
    assert score.structural == pytest.approx(0.3, abs=1e-9)
    assert score.z == pytest.approx(1.15, abs=1e-9)


def test_score_zero_centrality_ignores_weight():
    shaped = shaped_from([0, 1, 2], [0.0, 2.0])
    for w in (0.0, 0.3, 5.0):
        score = trajectory_score(shaped, scores_with(), AdvantageConfig(w_struct=w))
        assert score.z == score.return_head


def test_group_advantage_hand_example():
    cfg = AdvantageConfig()
    scores = [TrajectoryScore(2.0, 2.0, 0.0), TrajectoryScore(0.0, 0.0, 0.0)]
    adv = trajectory_advantage(scores, cfg)
    assert adv == pytest.approx([0.7071067761865475, -0.7071067761865475], abs=1e-6)
    assert abs(adv.mean()) < 1e-9


def test_group_advantage_degenerate_cases():
    cfg = AdvantageConfig()
    same = [TrajectoryScore(1.3, 1.3, 0.0)] * 4
    assert np.all(trajectory_advantage(same, cfg) == 0.0)
    assert np.all(trajectory_advantage(same[:1], cfg) == 0.0)
    with pytest.raises(EmptyGroupError):
        trajectory_advantage([], cfg)


def test_group_advantage_shift_invariance():
    cfg = AdvantageConfig()
    rng = np.random.default_rng(0)
    zs = rng.normal(size=8)
    base = trajectory_advantage([TrajectoryScore(z, z, 0.0) for z in zs], cfg)
    shifted = trajectory_advantage([TrajectoryScore(z + 17.5, z + 17.5, 0.0) for z in zs], cfg)
    assert np.allclose(base, shifted, atol=1e-9)


def test_group_advantage_scale_preserves_order_and_sign():
    cfg = AdvantageConfig()
    rng = np.random.default_rng(1)
    zs = rng.normal(size=8)
    base = trajectory_advantage([TrajectoryScore(z, z, 0.0) for z in zs], cfg)
    scaled = trajectory_advantage([TrajectoryScore(3.0 * z, 3.0 * z, 0.0) for z in zs], cfg)
    assert np.array_equal(np.argsort(base), np.argsort(scaled))
    assert np.all(np.sign(base) == np.sign(scaled))


def test_cluster_states_partition():
    group = [shaped_from([0, 1, 0, 2], [0.0] * 3), shaped_from([1, 1, 3], [0.0] * 2)]
    clusters = cluster_states(group)
    members = [m for cluster in clusters.values() for m in cluster]
    assert sorted(members) == sorted(
        (i, t) for i, s in enumerate(group) for t in range(len(s))
    )
    assert (0, 0) in clusters[0] and (0, 2) in clusters[0]  # same-state revisit clusters together
    assert len(clusters[1]) == 3  # shared across trajectories and within one


def test_cluster_by_state_not_by_trajectory():
    group = [shaped_from([5, 5, 5], [0.0] * 2)]
    clusters = cluster_states(group)
    assert clusters[5] == [(0, 0), (0, 1)]


def test_local_advantage_singleton_cluster_zero():
    cfg = AdvantageConfig()
    clusters = {0: [(0, 0)]}
    out = local_advantage(clusters, [np.array([3.0])], scores_with({0: 0.8}), cfg)
    assert out[0][0] == 0.0


def test_local_advantage_hand_example():
    cfg = AdvantageConfig()
    clusters = {0: [(0, 0), (1, 0)]}
    returns = [np.array([2.0]), np.array([0.0])]
    out = local_advantage(clusters, returns, scores_with({0: 0.5}), cfg)
    assert out[0][0] == pytest.approx(1.0606601642798212, abs=1e-6)
    assert out[1][0] == pytest.approx(-1.0606601642798212, abs=1e-6)


def test_local_advantage_zero_centrality_is_plain_zscore():
    cfg = AdvantageConfig()
    clusters = {0: [(0, 0), (0, 1)]}
    returns = [np.array([2.0, 0.0])]
    out = local_advantage(clusters, returns, scores_with(), cfg)
    assert out[0][0] == pytest.approx(0.7071067761865475, abs=1e-6)


def test_centrality_amplification():
    cfg = AdvantageConfig()
    returns = [np.array([2.0, 0.0])]
    low = local_advantage({0: [(0, 0), (0, 1)]}, returns, scores_with({0: 0.1}), cfg)
    high = local_advantage({0: [(0, 0), (0, 1)]}, returns, scores_with({0: 0.9}), cfg)
    assert np.all(np.abs(high[0]) > np.abs(low[0]))


def test_unified_endpoints():
    cfg_t = AdvantageConfig(lam=0.0)
    cfg_l = AdvantageConfig(lam=1.0)
    traj = np.array([1.0, 1.0, -1.0, -1.0])
    local = np.array([0.0, 2.0, 0.0, -2.0])
    eps = cfg_t.epsilon
    assert np.allclose(unified_advantage(traj, local, cfg_t), normalize_batch(traj, eps))
    assert np.allclose(unified_advantage(local, local, cfg_l), normalize_batch(local, eps))


def test_unified_opposite_components_cancel():
    cfg = AdvantageConfig(lam=0.5)
    traj = np.array([2.0, -2.0, 1.0, -1.0])
    assert np.allclose(unified_advantage(traj, -traj, cfg), 0.0, atol=1e-12)


def test_unified_components_are_zero_mean():
    cfg = AdvantageConfig(lam=0.3)
    rng = np.random.default_rng(9)
    traj, local = rng.normal(size=50), rng.normal(size=50)
    out = unified_advantage(traj, local, cfg)
    recombined = (1 - cfg.lam) * normalize_batch(traj, cfg.epsilon) + cfg.lam * normalize_batch(
        local, cfg.epsilon
    )
    assert np.allclose(out, recombined, atol=1e-12)
    assert abs(normalize_batch(traj, cfg.epsilon).mean()) < 1e-9


def test_unified_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        unified_advantage(np.zeros(3), np.zeros(4), AdvantageConfig())


def test_broadcast_repeats_by_length():
    out = broadcast_per_trajectory(np.array([1.0, -1.0]), [2, 3])
    assert np.allclose(out, [1.0, 1.0, -1.0, -1.0, -1.0])
    with pytest.raises(ShapeMismatchError):
        broadcast_per_trajectory(np.array([1.0]), [2, 3])


def test_partition_property_random_batches():
    rng = np.random.default_rng(123)
    for _ in range(25):
        group = []
        for _ in range(int(rng.integers(1, 6))):
            T = int(rng.integers(1, 9))
            keys = list(rng.integers(0, 6, size=T + 1))
            group.append(shaped_from(keys, list(rng.normal(size=T))))
        clusters = cluster_states(group)
        members = sorted(m for c in clusters.values() for m in c)
        expected = sorted((i, t) for i, s in enumerate(group) for t in range(len(s)))
        assert members == expected


def test_config_validation():
    with pytest.raises(ConfigError):
        AdvantageConfig(lam=1.5)
    with pytest.raises(ConfigError):
        AdvantageConfig(epsilon=0.0)
    with pytest.raises(ConfigError):
        AdvantageConfig(w_struct=-1.0)
