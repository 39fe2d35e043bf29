"""Run complete battles between two policies."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .agents.base import Policy
from .engine.battle import step
from .engine.config import GameOptions, TeamConfig
from .engine.obs import Observation, encode_frame, encode_observation
from .engine.state import BattleState, start_battle


@dataclass
class MatchResult:
    winner: int  # 0 or 1
    turns: int
    events: list = field(default_factory=list)
    seed: int = 0


def play_battle(policies: tuple[Policy, Policy],
                teams: tuple[TeamConfig, TeamConfig],
                seed: int,
                options: GameOptions | None = None,
                observers: list | None = None) -> MatchResult:
    """Play one battle to termination.

    ``observers`` optionally receives ``(state, player, obs, joint)`` tuples
    for each decision point, which rollout collection hooks into.
    """
    options = options or GameOptions()
    state = start_battle(teams[0], teams[1], seed, options)
    rngs = [np.random.default_rng((seed, 101 + p)) for p in (0, 1)]
    histories: list[list[np.ndarray]] = [[], []]
    while not state.terminal:
        joints = []
        for player in (0, 1):
            obs = encode_observation(state, player,
                                     history=histories[player])
            joint = policies[player].act(obs, rngs[player])
            if observers is not None:
                observers.append((player, obs, joint))
            joints.append(joint)
        if options.n_frames > 1 and state.phase == "Turn":
            for player in (0, 1):
                histories[player].append(encode_frame(state, player))
        step(state, joints[0], joints[1])
    return MatchResult(winner=state.winner, turns=state.turn,
                       events=list(state.history), seed=seed)


def win_rate(p1: Policy, p2: Policy, teams1: list[TeamConfig],
             teams2: list[TeamConfig], n_games: int, seed: int = 0,
             options: GameOptions | None = None) -> float:
    """Fraction of games won by ``p1`` over uniform team draws."""
    rng = np.random.default_rng(seed)
    wins = 0
    for g in range(n_games):
        t1 = teams1[int(rng.integers(len(teams1)))]
        t2 = teams2[int(rng.integers(len(teams2)))]
        result = play_battle((p1, p2), (t1, t2), int(rng.integers(2**31)),
                             options=options)
        wins += 1 - result.winner
    return wins / n_games
