from .bc import Dataset, DemoRecord, action_match_rate, bc_loss, bc_train
from .hyper import Hyperparameters, desk_profile
from .optim import Adam, clip_grad_norm
from .paradigm import CheckpointPool, PoolMember, run_paradigm
from .ppo import PPODiagnostics, PPOState, compute_gae, ppo_update
from .rollout import (OpponentSampler, RolloutBatch, SelfPlaySampler,
                      UniformPoolSampler, WeightedPoolSampler,
                      collect_rollouts)

__all__ = [
    "Hyperparameters", "desk_profile", "Adam", "clip_grad_norm",
    "Dataset", "DemoRecord", "bc_train", "bc_loss", "action_match_rate",
    "RolloutBatch", "collect_rollouts", "OpponentSampler", "SelfPlaySampler",
    "UniformPoolSampler", "WeightedPoolSampler",
    "compute_gae", "ppo_update", "PPOState", "PPODiagnostics",
    "CheckpointPool", "PoolMember", "run_paradigm",
]
