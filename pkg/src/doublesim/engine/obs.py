"""Player-view observation encoding.

Each observation frame is a 12 x F matrix: rows 0-5 are the viewing player's
team in team order, rows 6-11 the opponent's team.  Every row concatenates
per-battler features, the owning side's features, and the global features.
Hidden information never enters the encoding: opponent stat allocations have
no feature at all, and an opponent battler that has not yet appeared on the
field contributes only its team-sheet features (species/types, plus
moves/tera under open team sheets).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..gamedata import STATUSES, get_data
from .actions import N_ACTIONS
from .battle import legal_slot_actions
from .state import BOOST_KEYS, BattleState, SideState

MAX_POWER = 250.0


def _dims():
    data = get_data()
    n_species = len(data.species)
    n_types = len(data.types)
    n_moves = len(data.moves)
    p = (n_species + 2 * n_types + n_types + 1 + len(STATUSES)
         + len(BOOST_KEYS) + 5 + 4 * (n_moves + 2))
    s = 5
    g = 6
    return p, s, g


def feature_sizes() -> tuple[int, int, int]:
    """(p, s, g) feature-group widths for the current data files."""
    return _dims()


def frame_width() -> int:
    p, s, g = _dims()
    return p + s + g


@dataclass
class Observation:
    frames: np.ndarray  # (n_frames, 12, p+s+g)
    masks: np.ndarray  # (2, 107) bool, per-slot legality
    phase: str
    forbid_pass_pass: bool = False  # lone-replacement constraint (see battle)

    @property
    def current(self) -> np.ndarray:
        return self.frames[-1]


def _global_features(state: BattleState) -> np.ndarray:
    g = np.zeros(6)
    if state.weather == "rain":
        g[0] = 1.0
    elif state.weather == "sun":
        g[1] = 1.0
    g[2] = state.weather_turns / 5.0
    if state.terrain == "grassy":
        g[3] = 1.0
    g[4] = state.terrain_turns / 5.0
    g[5] = state.turn / state.options.turn_cap
    return g


def _side_features(side: SideState) -> np.ndarray:
    s = np.zeros(5)
    tw = side.conditions.get("tailwind", 0)
    br = side.conditions.get("barrier", 0)
    s[0] = 1.0 if tw > 0 else 0.0
    s[1] = tw / 4.0
    s[2] = 1.0 if br > 0 else 0.0
    s[3] = br / 5.0
    s[4] = 1.0 if side.tera_used else 0.0
    return s


def _mon_features(side: SideState, team_index: int, own: bool,
                  open_sheets: bool) -> np.ndarray:
    data = get_data()
    n_species = len(data.species)
    n_types = len(data.types)
    n_moves = len(data.moves)
    mon = side.mons[team_index]
    cfg = side.team.members[team_index]
    spec = data.species[data.species_index[cfg.species]]
    visible = own or mon.revealed

    parts = []
    species_oh = np.zeros(n_species)
    species_oh[spec.id] = 1.0
    parts.append(species_oh)

    types_oh = np.zeros(2 * n_types)
    for i, t in enumerate(spec.types[:2]):
        types_oh[i * n_types + data.type_index[t]] = 1.0
    parts.append(types_oh)

    tera_oh = np.zeros(n_types)
    if own or open_sheets or mon.is_tera:
        tera_oh[data.type_index[cfg.tera_type]] = 1.0
    parts.append(tera_oh)

    hp = np.zeros(1)
    hp[0] = mon.hp / mon.max_hp if visible else 1.0
    parts.append(hp)

    status_oh = np.zeros(len(STATUSES))
    if visible and mon.status is not None:
        status_oh[STATUSES.index(mon.status)] = 1.0
    parts.append(status_oh)

    boosts = np.zeros(len(BOOST_KEYS))
    if visible:
        for i, k in enumerate(BOOST_KEYS):
            boosts[i] = mon.boosts[k] / 6.0
    parts.append(boosts)

    flags = np.zeros(5)
    is_active = team_index in side.active and not mon.fainted
    on_bench = (team_index in side.chosen and team_index not in side.active
                and not mon.fainted)
    flags[0] = 1.0 if is_active else 0.0
    # bench membership of unrevealed foes is hidden information
    flags[1] = 1.0 if (on_bench and (own or mon.revealed)) else 0.0
    flags[2] = 1.0 if mon.fainted else 0.0
    flags[3] = 1.0 if mon.revealed else 0.0
    flags[4] = team_index / 5.0  # team-sheet position, public knowledge
    parts.append(flags)

    moves_feat = np.zeros(4 * (n_moves + 2))
    for i, name in enumerate(cfg.moves):
        if not (own or open_sheets or name in mon.revealed_moves):
            continue
        move = data.moves[data.move_index[name]]
        off = i * (n_moves + 2)
        moves_feat[off + move.id] = 1.0
        moves_feat[off + n_moves] = move.power / MAX_POWER
        moves_feat[off + n_moves + 1] = move.accuracy / 100.0
    parts.append(moves_feat)

    return np.concatenate(parts)


def row_order(side: SideState) -> list[int]:
    """Canonical row order: active slot a, active slot b, rest in team order."""
    actives = [i for i in side.active if i is not None]
    if not actives:
        return list(range(6))
    return actives + [i for i in range(6) if i not in actives]


def encode_frame(state: BattleState, player: int) -> np.ndarray:
    open_sheets = state.options.open_team_sheets
    own = state.side(player)
    foe = state.side(1 - player)
    g = _global_features(state)
    rows = []
    for idx in row_order(own):
        rows.append(np.concatenate(
            [_mon_features(own, idx, True, open_sheets), _side_features(own), g]))
    for idx in row_order(foe):
        rows.append(np.concatenate(
            [_mon_features(foe, idx, False, open_sheets), _side_features(foe), g]))
    return np.stack(rows)


def encode_observation(state: BattleState, player: int,
                       n_frames: int | None = None,
                       history: list[np.ndarray] | None = None) -> Observation:
    """Stacked observation; missing history frames are zero-padded oldest-first."""
    if n_frames is None:
        n_frames = state.options.n_frames
    current = encode_frame(state, player)
    prior = list(history or [])[-(n_frames - 1):] if n_frames > 1 else []
    pad = n_frames - 1 - len(prior)
    frames = [np.zeros_like(current)] * pad + prior + [current]
    masks = np.zeros((2, N_ACTIONS), dtype=bool)
    forbid_pass_pass = False
    if not state.terminal:
        for slot in (0, 1):
            masks[slot] = legal_slot_actions(state, player, slot)
        side = state.side(player)
        mons = [side.active_mon(s) for s in (0, 1)]
        forbid_pass_pass = bool(
            state.phase == "Turn" and side.bench()
            and all(m is not None and m.fainted for m in mons))
    return Observation(frames=np.stack(frames), masks=masks, phase=state.phase,
                       forbid_pass_pass=forbid_pass_pass)


# --- feature layout / decoding ---------------------------------------------

class FrameLayout:
    """Index map into one observation row, for feature-level consumers."""

    def __init__(self) -> None:
        data = get_data()
        self.n_species = len(data.species)
        self.n_types = len(data.types)
        self.n_moves = len(data.moves)
        off = 0

        def take(width):
            nonlocal off
            sl = slice(off, off + width)
            off += width
            return sl

        self.species = take(self.n_species)
        self.type1 = take(self.n_types)
        self.type2 = take(self.n_types)
        self.tera = take(self.n_types)
        self.hp = off; off += 1
        self.status = take(len(STATUSES))
        self.boosts = take(len(BOOST_KEYS))
        self.active = off; off += 1
        self.bench = off; off += 1
        self.fainted = off; off += 1
        self.revealed = off; off += 1
        self.team_slot = off; off += 1
        self.move_slots = []
        for _ in range(4):
            move_oh = take(self.n_moves)
            power = off; off += 1
            accuracy = off; off += 1
            self.move_slots.append((move_oh, power, accuracy))
        self.side = take(5)
        self.global_ = take(6)
        self.width = off

    def species_id(self, row: np.ndarray) -> int | None:
        oh = row[self.species]
        return int(np.argmax(oh)) if oh.any() else None

    def move_id(self, row: np.ndarray, slot: int) -> int | None:
        oh = row[self.move_slots[slot][0]]
        return int(np.argmax(oh)) if oh.any() else None

    def row_types(self, row: np.ndarray) -> list[int]:
        out = []
        for sl in (self.type1, self.type2):
            oh = row[sl]
            if oh.any():
                out.append(int(np.argmax(oh)))
        return out


_LAYOUT: FrameLayout | None = None


def get_layout() -> FrameLayout:
    global _LAYOUT
    if _LAYOUT is None:
        _LAYOUT = FrameLayout()
    return _LAYOUT
