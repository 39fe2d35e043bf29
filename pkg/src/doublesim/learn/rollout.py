"""Experience collection for the PPO learner.

The learner always controls player 0; the opponent is drawn from a sampler at
every episode start.  Exactly ``n_steps`` learner decision points are
returned; if that cuts an episode short, the final value estimate is kept for
bootstrapping.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..agents.base import Policy
from ..agents.network import (ArchDescriptor, ParametricPolicy, log_prob,
                              value_forward)
from ..engine.actions import JointAction
from ..engine.battle import step
from ..engine.config import GameOptions, TeamConfig
from ..engine.obs import Observation, encode_observation
from ..engine.state import start_battle
from ..teams import sample_matchup


@dataclass
class RolloutBatch:
    obs: list[Observation] = field(default_factory=list)
    actions: list[JointAction] = field(default_factory=list)
    log_probs: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    dones: list[bool] = field(default_factory=list)
    episode_seeds: list[int] = field(default_factory=list)
    last_value: float = 0.0  # bootstrap for a truncated final episode
    episode_rewards: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.obs)


class OpponentSampler:
    """Draws the opponent policy at each episode start."""

    def __call__(self, rng: np.random.Generator) -> Policy:
        raise NotImplementedError


class SelfPlaySampler(OpponentSampler):
    def __init__(self, current: Policy) -> None:
        self.current = current

    def __call__(self, rng: np.random.Generator) -> Policy:
        return self.current


class UniformPoolSampler(OpponentSampler):
    """Fictitious play: uniform over the checkpoint pool."""

    def __init__(self, policies: list[Policy]) -> None:
        if not policies:
            raise ValueError("pool sampler needs a non-empty pool")
        self.policies = policies

    def __call__(self, rng: np.random.Generator) -> Policy:
        return self.policies[int(rng.integers(len(self.policies)))]


class WeightedPoolSampler(OpponentSampler):
    """Double oracle: sample from a meta-strategy over the pool."""

    def __init__(self, policies: list[Policy], weights: np.ndarray) -> None:
        if len(policies) != len(weights):
            raise ValueError("weights must match pool size")
        self.policies = policies
        w = np.asarray(weights, dtype=float)
        self.weights = w / w.sum()

    def __call__(self, rng: np.random.Generator) -> Policy:
        return self.policies[int(rng.choice(len(self.policies), p=self.weights))]


def collect_rollouts(actor_params: np.ndarray, critic_params: np.ndarray,
                     desc: ArchDescriptor, opponent_sampler: OpponentSampler,
                     teams: list[TeamConfig], n_steps: int, seed: int,
                     options: GameOptions | None = None) -> RolloutBatch:
    options = options or GameOptions()
    learner = ParametricPolicy(actor_params, desc)
    batch = RolloutBatch()
    master = np.random.default_rng(seed)
    while len(batch) < n_steps:
        ep_seed = int(master.integers(2**31))
        t1, t2 = sample_matchup(teams, master,
                                disable_mirror=options.disable_mirror_matches)
        opponent = opponent_sampler(master)
        state = start_battle(t1, t2, ep_seed, options)
        act_rngs = [np.random.default_rng((ep_seed, 101 + p)) for p in (0, 1)]
        batch.episode_seeds.append(ep_seed)
        ep_steps: list[int] = []
        truncated = False
        while not state.terminal:
            obs0 = encode_observation(state, 0)
            if len(batch) >= n_steps:
                batch.last_value = value_forward(critic_params, obs0, desc)
                truncated = True
                break
            a0 = learner.act(obs0, act_rngs[0])
            obs1 = encode_observation(state, 1)
            a1 = opponent.act(obs1, act_rngs[1])
            ep_steps.append(len(batch))
            batch.obs.append(obs0)
            batch.actions.append(a0)
            batch.log_probs.append(log_prob(actor_params, obs0, a0, desc))
            batch.values.append(value_forward(critic_params, obs0, desc))
            batch.rewards.append(0.0)
            batch.dones.append(False)
            step(state, a0, a1)
        if not truncated and ep_steps:
            reward = 1.0 if state.winner == 0 else -1.0
            batch.rewards[ep_steps[-1]] = reward
            batch.dones[ep_steps[-1]] = True
            batch.episode_rewards.append(reward)
    return batch
