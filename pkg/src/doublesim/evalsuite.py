"""Evaluation protocols: performance, generalization, exploitability,
and team-similarity statistics.

The performance test evaluates agents on the exact intersection of their
training team sets; the generalization test on teams none of them trained
with.  Both constraints are enforced at report construction, not advisory.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .agents.base import Policy
from .agents.network import ArchDescriptor, ParametricPolicy, init_params
from .engine.config import GameOptions, TeamConfig
from .errors import ValidationError
from .learn.hyper import Hyperparameters
from .learn.ppo import PPOState, ppo_update
from .learn.rollout import SelfPlaySampler, collect_rollouts
from .metagame import PayoffMatrix, crossplay_entry, estimate_crossplay


@dataclass
class EvalAgent:
    """A policy plus the provenance the protocols need."""

    policy: Policy
    name: str
    train_team_ids: set[str] = field(default_factory=set)


@dataclass
class EvalReport:
    protocol: str  # "performance" | "generalization"
    agent_names: list[str]
    matrix: PayoffMatrix
    team_ids: list[str]

    def __str__(self) -> str:
        width = max(len(n) for n in self.agent_names) + 2
        lines = [f"{self.protocol} test over {len(self.team_ids)} teams",
                 " " * width + "  ".join(f"{n:>{width}}" for n in self.agent_names)]
        ci = self.matrix.ci_halfwidths()
        for i, name in enumerate(self.agent_names):
            cells = "  ".join(
                f"{self.matrix.win_rates[i, j]:.3f}±{ci[i, j]:.3f}".rjust(width)
                for j in range(len(self.agent_names)))
            lines.append(f"{name:<{width}}{cells}")
        return "\n".join(lines)


def performance_test(agents: list[EvalAgent], teams: list[TeamConfig],
                     n_games: int, seed: int = 0,
                     options: GameOptions | None = None) -> EvalReport:
    """Cross-play on the intersection of every agent's training team set."""
    shared = set.intersection(*(a.train_team_ids for a in agents))
    if not shared:
        raise ValidationError(
            "performance test requires a shared training team; "
            "the agents' team sets have empty intersection")
    eval_teams = [t for t in teams if t.id in shared]
    if not eval_teams:
        raise ValidationError("no team configs supplied for the shared ids")
    matrix = estimate_crossplay([a.policy for a in agents], eval_teams,
                                n_games, seed, options,
                                policy_ids=[a.name for a in agents])
    return EvalReport("performance", [a.name for a in agents], matrix,
                      [t.id for t in eval_teams])


def generalization_test(agents: list[EvalAgent],
                        held_out_teams: list[TeamConfig],
                        n_games: int, seed: int = 0,
                        options: GameOptions | None = None) -> EvalReport:
    """Cross-play on teams no agent has trained with (checked by team id)."""
    trained = set.union(*(a.train_team_ids for a in agents))
    overlap = sorted(t.id for t in held_out_teams if t.id in trained)
    if overlap:
        raise ValidationError(
            f"held-out set overlaps training sets: {', '.join(overlap)}")
    if not held_out_teams:
        raise ValidationError("held-out team set is empty")
    matrix = estimate_crossplay([a.policy for a in agents], held_out_teams,
                                n_games, seed, options,
                                policy_ids=[a.name for a in agents])
    return EvalReport("generalization", [a.name for a in agents], matrix,
                      [t.id for t in held_out_teams])


# --- exploitability ----------------------------------------------------------

@dataclass
class ExploitCurve:
    points: list[tuple[int, float]]  # (training step, exploiter win rate)

    @property
    def exploitability(self) -> float:
        """Reported exploitability: the running maximum of the curve."""
        return max(w for _, w in self.points)


def exploitability(target: Policy, teams: list[TeamConfig],
                   hyper: Hyperparameters, seed: int = 0,
                   desc: ArchDescriptor | None = None,
                   init_actor: np.ndarray | None = None,
                   eval_games: int = 100, eval_every_updates: int = 5,
                   options: GameOptions | None = None) -> ExploitCurve:
    """Train a PPO exploiter against the frozen target; return its curve.

    Evaluation seeds are fixed and disjoint from training seeds so points
    are comparable across budgets.
    """
    options = options or GameOptions()
    if desc is None:
        desc = ArchDescriptor.default(n_frames=options.n_frames)
    hyper.validate()
    rng = np.random.default_rng(seed)
    actor = (np.array(init_actor, dtype=float) if init_actor is not None
             else init_params(desc, "actor", rng))
    critic = init_params(desc, "critic", rng)
    ppo_state = PPOState.create(len(actor), len(critic), hyper)
    eval_seed = int(np.random.default_rng((seed, 777)).integers(2**31))

    def evaluate(params) -> float:
        policy = ParametricPolicy(params, desc)
        return crossplay_entry(policy, target, teams, eval_games, eval_seed,
                               options)

    points = [(0, evaluate(actor))]
    sampler = _FrozenSampler(target)
    steps_done, update = 0, 0
    while steps_done < hyper.total_timesteps:
        batch = collect_rollouts(actor, critic, desc, sampler, teams,
                                 hyper.steps_per_update,
                                 int(rng.integers(2**31)), options)
        actor, critic, _ = ppo_update(actor, critic, batch, hyper, desc,
                                      ppo_state, seed=int(rng.integers(2**31)))
        steps_done += len(batch)
        update += 1
        if update % eval_every_updates == 0:
            points.append((steps_done, evaluate(actor)))
    if points[-1][0] != steps_done:
        points.append((steps_done, evaluate(actor)))
    return ExploitCurve(points)


class _FrozenSampler:
    def __init__(self, target: Policy) -> None:
        self.target = target

    def __call__(self, rng) -> Policy:
        return self.target


# --- team similarity ---------------------------------------------------------

def _member_similarity(m1, m2) -> float:
    """0.5 for the species match + 0.5 * mean of five attribute indicators."""
    s1, s2 = set(m1.moves), set(m2.moves)
    jaccard = len(s1 & s2) / len(s1 | s2) if s1 | s2 else 1.0
    attrs = np.mean([
        float(m1.item == m2.item),
        float(m1.ability == m2.ability),
        float(m1.tera_type == m2.tera_type),
        jaccard,
        float(m1.stats == m2.stats),
    ])
    return 0.5 + 0.5 * float(attrs)


def team_similarity(t1: TeamConfig, t2: TeamConfig) -> float:
    """Symmetric score in [0, 1]; 1 on identity, 0 with no shared species."""
    pool2 = {m.species: m for m in t2.members}
    total = 0.0
    for m1 in t1.members:
        m2 = pool2.pop(m1.species, None)
        if m2 is not None:
            total += _member_similarity(m1, m2)
    return total / 6.0


@dataclass
class SimilarityStatistics:
    mean: float
    median: float
    min: float
    max: float
    n_pairs: int


def set_statistics(seen: list[TeamConfig],
                   unseen: list[TeamConfig]) -> SimilarityStatistics:
    """Similarity statistics over all seen x unseen team pairs."""
    scores = [team_similarity(a, b) for a in seen for b in unseen]
    if not scores:
        raise ValidationError("need non-empty team sets")
    arr = np.asarray(scores)
    return SimilarityStatistics(float(arr.mean()), float(np.median(arr)),
                                float(arr.min()), float(arr.max()), len(arr))
