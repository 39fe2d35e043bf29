"""Population training: self-play, fictitious play, and double oracle.

All three alternate experience collection and PPO updates; they differ only
in how the opponent is drawn.  SP plays the current learner snapshot, FP a
uniform draw from the checkpoint pool, DO a draw from the Nash distribution
of the pool's empirical payoff matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..agents.network import ArchDescriptor, ParametricPolicy, init_params
from ..engine.config import GameOptions, TeamConfig
from ..errors import ConfigurationError, SolverError
from ..metagame import crossplay_entry, nash_of_win_rates
from .hyper import Hyperparameters
from .ppo import PPOState, ppo_update
from .rollout import (SelfPlaySampler, UniformPoolSampler, WeightedPoolSampler,
                      collect_rollouts)

PARADIGMS = ("SP", "FP", "DO")
POOL_CAP = 32
SNAPSHOT_EVERY_UPDATES = 10
DO_GAMES_PER_PAIR = 100


@dataclass
class PoolMember:
    params: np.ndarray
    step: int


@dataclass
class CheckpointPool:
    """Ordered parameter checkpoints plus their empirical payoff matrix."""

    desc: ArchDescriptor
    members: list[PoolMember] = field(default_factory=list)
    payoff: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    paradigm: str = "SP"
    seed: int = 0
    team_ids: list[str] = field(default_factory=list)
    incidents: list[str] = field(default_factory=list)
    metrics: list[dict] = field(default_factory=list)

    @property
    def output(self) -> PoolMember:
        return self.members[-1]

    def output_policy(self) -> ParametricPolicy:
        return ParametricPolicy(self.output.params, self.desc)

    def add(self, params: np.ndarray, step: int) -> None:
        self.members.append(PoolMember(np.array(params), step))
        n = len(self.members)
        grown = np.full((n, n), 0.5)
        if n > 1:
            grown[:n - 1, :n - 1] = self.payoff
        self.payoff = grown
        if n > POOL_CAP:
            # keep the oldest anchor, thin from the middle
            drop = 1 + (n - 2) // 2
            self.members.pop(drop)
            keep = [i for i in range(n) if i != drop]
            self.payoff = self.payoff[np.ix_(keep, keep)]


def _refresh_payoff(pool: CheckpointPool, teams: list[TeamConfig],
                    options: GameOptions, seed: int) -> None:
    """Fill in payoff entries for the newest member against all others."""
    n = len(pool.members)
    j = n - 1
    new_policy = ParametricPolicy(pool.members[j].params, pool.desc)
    for i in range(j):
        old_policy = ParametricPolicy(pool.members[i].params, pool.desc)
        pair_seed = int(np.random.default_rng((seed, i, j)).integers(2**31))
        w = crossplay_entry(old_policy, new_policy, teams, DO_GAMES_PER_PAIR,
                            pair_seed, options)
        pool.payoff[i, j] = w
        pool.payoff[j, i] = 1.0 - w


def _make_sampler(pool: CheckpointPool, paradigm: str,
                  current_params: np.ndarray):
    if paradigm == "SP":
        return SelfPlaySampler(ParametricPolicy(current_params, pool.desc))
    policies = [ParametricPolicy(m.params, pool.desc) for m in pool.members]
    if paradigm == "FP":
        return UniformPoolSampler(policies)
    # DO: Nash of the empirical payoff matrix
    try:
        strategy = nash_of_win_rates(pool.payoff)
        return WeightedPoolSampler(policies, strategy.probs)
    except SolverError as exc:
        pool.incidents.append(f"nash solve failed, uniform fallback: {exc}")
        return UniformPoolSampler(policies)


def run_paradigm(paradigm: str, teams: list[TeamConfig],
                 hyper: Hyperparameters, seed: int,
                 desc: ArchDescriptor | None = None,
                 init_actor: np.ndarray | None = None,
                 options: GameOptions | None = None,
                 progress: bool = False) -> CheckpointPool:
    """Full training run; returns the pool with the output policy last."""
    if paradigm not in PARADIGMS:
        raise ConfigurationError(f"unknown paradigm {paradigm!r}")
    if not teams:
        raise ConfigurationError("need at least one training team")
    hyper.validate()
    options = options or GameOptions()
    if desc is None:
        desc = ArchDescriptor.default(n_frames=options.n_frames)
    rng = np.random.default_rng(seed)
    actor = (np.array(init_actor, dtype=float) if init_actor is not None
             else init_params(desc, "actor", rng))
    critic = init_params(desc, "critic", rng)
    pool = CheckpointPool(desc=desc, paradigm=paradigm, seed=seed,
                          team_ids=[t.id for t in teams])
    pool.add(actor, 0)
    ppo_state = PPOState.create(len(actor), len(critic), hyper)

    steps_done, update = 0, 0
    while steps_done < hyper.total_timesteps:
        sampler = _make_sampler(pool, paradigm, actor)
        batch = collect_rollouts(actor, critic, desc, sampler, teams,
                                 hyper.steps_per_update,
                                 int(rng.integers(2**31)), options)
        actor, critic, diag = ppo_update(actor, critic, batch, hyper, desc,
                                         ppo_state,
                                         seed=int(rng.integers(2**31)))
        steps_done += len(batch)
        update += 1
        mean_rew = (float(np.mean(batch.episode_rewards))
                    if batch.episode_rewards else 0.0)
        pool.metrics.append({
            "step": steps_done, "policy_loss": diag.policy_loss,
            "value_loss": diag.value_loss, "entropy": diag.entropy,
            "mean_episode_reward": mean_rew,
        })
        if progress:
            print(f"[{paradigm}] step {steps_done} reward {mean_rew:+.3f} "
                  f"entropy {diag.entropy:.3f}")
        if update % SNAPSHOT_EVERY_UPDATES == 0:
            pool.add(actor, steps_done)
            if paradigm == "DO":
                _refresh_payoff(pool, teams, options,
                                int(rng.integers(2**31)))
    if pool.members[-1].step != steps_done:
        pool.add(actor, steps_done)
        if paradigm == "DO":
            _refresh_payoff(pool, teams, options, int(rng.integers(2**31)))
    return pool
