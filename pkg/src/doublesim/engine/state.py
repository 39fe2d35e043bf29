"""Battle state containers and battle initialization.

A ``BattleState`` is a single-owner value: nothing in here is shared between
battles, so any number of battles can run in parallel as long as each state
is only touched by one thread at a time.  All randomness flows through the
state's own seeded generator in a fixed draw order, which is what makes the
event stream reproducible bit-for-bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..gamedata import get_data
from .config import GameOptions, TeamConfig, compute_stats

BOOST_KEYS = ("atk", "def", "spa", "spd", "spe", "acc", "eva")

PHASE_PREVIEW1 = "TeamPreview1"
PHASE_PREVIEW2 = "TeamPreview2"
PHASE_TURN = "Turn"
PHASE_TERMINAL = "Terminal"


@dataclass
class BattlerState:
    team_index: int
    stats: dict[str, int]
    hp: int
    max_hp: int
    status: str | None = None
    boosts: dict[str, int] = field(default_factory=lambda: {k: 0 for k in BOOST_KEYS})
    fainted: bool = False
    is_tera: bool = False
    revealed: bool = False
    revealed_moves: set[str] = field(default_factory=set)
    item_used: bool = False  # one-shot items: Last Guard, Tonic Berry
    protected: bool = False
    protected_last_turn: bool = False

    def reset_on_switch_out(self) -> None:
        self.boosts = {k: 0 for k in BOOST_KEYS}
        self.protected = False
        self.protected_last_turn = False


@dataclass
class SideState:
    team: TeamConfig
    mons: list[BattlerState]
    chosen: list[int] = field(default_factory=list)  # 4 team indices after preview
    active: list[int | None] = field(default_factory=lambda: [None, None])
    tera_used: bool = False
    conditions: dict[str, int] = field(default_factory=dict)  # name -> turns left

    def active_mon(self, slot: int) -> BattlerState | None:
        idx = self.active[slot]
        if idx is None:
            return None
        return self.mons[idx]

    def slot_occupied(self, slot: int) -> bool:
        mon = self.active_mon(slot)
        return mon is not None and not mon.fainted

    def alive_chosen(self) -> list[int]:
        return [i for i in self.chosen if not self.mons[i].fainted]

    def bench(self) -> list[int]:
        return [i for i in self.chosen
                if i not in self.active and not self.mons[i].fainted]


@dataclass
class BattleState:
    options: GameOptions
    sides: list[SideState]
    rng: np.random.Generator
    phase: str = PHASE_PREVIEW1
    turn: int = 0
    weather: str | None = None
    weather_turns: int = 0
    terrain: str | None = None
    terrain_turns: int = 0
    winner: int | None = None  # 0 or 1 once terminal
    history: list[tuple] = field(default_factory=list)  # all events so far
    seed: int = 0

    def side(self, player: int) -> SideState:
        return self.sides[player]

    @property
    def terminal(self) -> bool:
        return self.phase == PHASE_TERMINAL


def _make_side(team: TeamConfig) -> SideState:
    mons = []
    for i, cfg in enumerate(team.members):
        stats = compute_stats(cfg)
        mons.append(BattlerState(team_index=i, stats=stats,
                                 hp=stats["hp"], max_hp=stats["hp"]))
    return SideState(team=team, mons=mons)


def start_battle(c1: TeamConfig, c2: TeamConfig, seed: int,
                 opts: GameOptions | None = None) -> BattleState:
    """Fresh battle in the team-preview phase (or first turn when skipped)."""
    opts = opts or GameOptions()
    opts.validate()
    c1.validate()
    c2.validate()
    if opts.disable_mirror_matches and c1.id == c2.id:
        raise ConfigurationError("mirror match rejected: both players use team "
                                 f"{c1.id}")
    state = BattleState(
        options=opts,
        sides=[_make_side(c1), _make_side(c2)],
        rng=np.random.default_rng(seed),
        seed=seed,
    )
    state.history.append(("start", get_data().content_hash))
    if opts.skip_team_preview:
        from .battle import apply_preview, begin_turn_phase
        for player in (0, 1):
            order = state.rng.permutation(6)
            apply_preview(state, player, leads=(int(order[0]), int(order[1])),
                          bench=(int(order[2]), int(order[3])))
        begin_turn_phase(state)
    return state


def side_hp_fraction(side: SideState) -> float:
    return sum(side.mons[i].hp / side.mons[i].max_hp for i in side.chosen)


def decide_cap_winner(state: BattleState) -> int:
    """Tiebreak at the turn cap: more survivors, then HP fraction, then coin."""
    alive = [len(s.alive_chosen()) for s in state.sides]
    if alive[0] != alive[1]:
        return 0 if alive[0] > alive[1] else 1
    frac = [side_hp_fraction(s) for s in state.sides]
    if frac[0] != frac[1]:
        return 0 if frac[0] > frac[1] else 1
    return int(state.rng.integers(2))
