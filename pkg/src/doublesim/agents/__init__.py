from .base import Policy, complete_joint, legal_joint_pairs, pair_matrix
from .checkpoint import load_checkpoint, save_checkpoint
from .network import (ArchDescriptor, ParametricPolicy, init_params,
                      joint_probabilities, log_prob, param_count,
                      policy_entropy_grad, policy_forward, policy_grad,
                      value_forward, value_grad)
from .scripted import (MaxBasePowerPlayer, RandomPlayer,
                       SimpleHeuristicsPlayer)

__all__ = [
    "Policy", "pair_matrix", "legal_joint_pairs", "complete_joint",
    "RandomPlayer", "MaxBasePowerPlayer", "SimpleHeuristicsPlayer",
    "ArchDescriptor", "ParametricPolicy", "init_params", "param_count",
    "policy_forward", "policy_grad", "policy_entropy_grad", "log_prob",
    "joint_probabilities", "value_forward", "value_grad",
    "save_checkpoint", "load_checkpoint",
]
