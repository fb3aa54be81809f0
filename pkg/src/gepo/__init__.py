"""Graph-enhanced policy optimization on sparse-reward gridworlds.

An online state-transition graph accumulates every observation cluster and
transition an agent experiences; node and edge centralities over that graph
drive intrinsic rewards, a dynamic discount factor, and a two-level advantage
estimate that feed a PPO-style tabular policy update. GRPO and PPO baselines
share the rollout and update machinery for controlled comparisons.
"""

from .advantage import (
    AdvantageConfig,
    TrajectoryScore,
    cluster_states,
    local_advantage,
    trajectory_advantage,
    trajectory_score,
    unified_advantage,
)
from .centrality import CentralityScores
from .embeddings import FeatureHashProvider, IdentityProvider, make_provider
from .envs import GridEnv, Layout, StepOutcome, layout_catalog, load_layout
from .harness import (
    ExperimentConfig,
    IterationMetrics,
    ablation_suite,
    benchmark_config,
    centrality_sweep,
    compare,
    default_config,
    rollout_sweep,
    run_experiment,
    training_iteration,
)
from .policy import (
    OptimConfig,
    PolicyParams,
    UpdateReport,
    action_probabilities,
    composite_loss,
    grpo_advantages,
    importance_ratio,
    surrogate_objective,
    update_policy,
)
from .shaping import (
    ShapedTrajectory,
    ShapingConfig,
    compute_returns,
    dynamic_discount,
    intrinsic_reward,
    shape_rewards,
)
from .state_graph import RefreshPolicy, TransitionGraph, maybe_refresh
from .trajectories import Trajectory, TrajectoryStep

__version__ = "0.1.0"
