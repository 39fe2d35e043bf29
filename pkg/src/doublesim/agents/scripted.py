"""Rule-based baseline players: random, max-base-power, weighted heuristics.

All three act purely on the observation encoding (they decode species, move
and HP features back out of the rows), so they see exactly what a learned
policy sees and nothing more.
"""
from __future__ import annotations

import numpy as np

from ..engine.actions import JointAction, decode_action
from ..engine.obs import Observation, get_layout
from ..gamedata import get_data
from .base import Policy, complete_joint, legal_joint_pairs, pair_matrix

_BASE_MOVE_LO, _BASE_MOVE_HI = 7, 27


class RandomPlayer(Policy):
    """Uniform over the legal joint actions."""

    name = "random"

    def act(self, obs: Observation, rng: np.random.Generator) -> JointAction:
        pairs = legal_joint_pairs(obs)
        i = int(rng.integers(len(pairs)))
        return JointAction(int(pairs[i][0]), int(pairs[i][1]))

    def action_distribution(self, obs: Observation):
        pairs = legal_joint_pairs(obs)
        p = 1.0 / len(pairs)
        return {(int(a), int(b)): p for a, b in pairs}


def _own_row(obs: Observation, slot: int) -> np.ndarray:
    return obs.current[slot]


def _move_power(obs: Observation, slot: int, move_slot: int) -> int:
    layout = get_layout()
    mid = layout.move_id(_own_row(obs, slot), move_slot - 1)
    if mid is None:
        return -1
    return get_data().moves[mid].power


class MaxBasePowerPlayer(Policy):
    """Greedy highest-base-power move, uniform over its legal foe targets."""

    name = "max-base-power"

    def _slot_pick(self, obs: Observation, slot: int,
                   rng: np.random.Generator) -> int:
        mask = obs.masks[slot]
        move_idx = [i for i in range(_BASE_MOVE_LO, _BASE_MOVE_HI) if mask[i]]
        if not move_idx:
            switches = [i for i in range(1, 7) if mask[i]]
            if switches:
                return int(rng.choice(switches))
            return 0
        best_slot, best_power = None, -1
        for i in move_idx:
            a = decode_action(i)
            power = _move_power(obs, slot, a.move_slot)
            if power > best_power:
                best_power, best_slot = power, a.move_slot
        cands = [i for i in move_idx if decode_action(i).move_slot == best_slot]
        foe = [i for i in cands if decode_action(i).target in ("foe-a", "foe-b")]
        none = [i for i in cands if decode_action(i).target == "none"]
        pool = foe or none or cands
        return int(rng.choice(pool))

    def act(self, obs: Observation, rng: np.random.Generator) -> JointAction:
        if obs.phase in ("TeamPreview1", "TeamPreview2"):
            return RandomPlayer().act(obs, rng)
        a = self._slot_pick(obs, 0, rng)
        b = self._slot_pick(obs, 1, rng)
        return complete_joint(obs, a, b, rng)

    def action_distribution(self, obs: Observation):
        # empirical: the only randomness is target choice; enumerate by brute force
        counts: dict[tuple[int, int], int] = {}
        rng = np.random.default_rng(0)
        for _ in range(256):
            a = self.act(obs, rng)
            counts[tuple(a)] = counts.get(tuple(a), 0) + 1
        total = sum(counts.values())
        return {k: v / total for k, v in counts.items()}


DEFAULT_WEIGHTS = np.array([1.0, 0.3, 0.3, 0.6, 0.5])
# terms: expected damage, type effectiveness, accuracy, own-HP pressure,
#        switch matchup


class SimpleHeuristicsPlayer(Policy):
    """Weighted heuristic scores per legal slot action; argmax, ties low."""

    name = "simple-heuristics"

    def __init__(self, weights: np.ndarray | None = None) -> None:
        self.weights = np.asarray(
            DEFAULT_WEIGHTS if weights is None else weights, dtype=float)
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("heuristic weights must be finite")

    # -- scoring helpers ----------------------------------------------------

    def _threat(self, row: np.ndarray, foe_rows: list[np.ndarray]) -> float:
        """Worst-case type effectiveness of the visible foes against a row."""
        layout = get_layout()
        data = get_data()
        my_types = [data.types[t] for t in layout.row_types(row)]
        if not my_types:
            return 1.0
        worst = 0.0
        for foe in foe_rows:
            for t in layout.row_types(foe):
                eff = data.effectiveness(data.types[t], tuple(my_types))
                worst = max(worst, eff)
        return worst

    def _score(self, obs: Observation, slot: int, index: int,
               foe_rows: list[np.ndarray], rows_by_team_slot: dict[int, int]
               ) -> float:
        w = self.weights
        layout = get_layout()
        data = get_data()
        action = decode_action(index)
        row = _own_row(obs, slot)
        hp_frac = row[layout.hp]

        if action.kind == "pass":
            return -1e9
        if action.kind == "switch":
            r = rows_by_team_slot.get(action.switch_to - 1)
            if r is None:
                return -1e9
            cand = obs.current[r]
            cur_threat = self._threat(row, foe_rows)
            cand_threat = self._threat(cand, foe_rows)
            return w[4] * (cur_threat - cand_threat) / 4.0 - 0.1
        # move action
        mid = layout.move_id(row, action.move_slot - 1)
        if mid is None:
            return -1e9
        move = get_data().moves[mid]
        acc = move.accuracy / 100.0
        if move.category == "status":
            if move.effect.get("protect"):
                return w[3] * (1.0 - hp_frac) * acc
            return 0.15 * (w[0] + w[2] * acc)
        my_types = [data.types[t] for t in layout.row_types(row)]
        stab = 1.5 if move.type in my_types else 1.0

        def eff_against(foe_row) -> float:
            types = tuple(data.types[t] for t in layout.row_types(foe_row))
            if not types:
                return 1.0
            return data.effectiveness(move.type, types)

        if action.target in ("foe-a", "foe-b"):
            foe_slot = 0 if action.target == "foe-a" else 1
            foe_row = obs.current[6 + foe_slot]
            if foe_row[layout.fainted] > 0 or foe_row[layout.active] == 0:
                return -1e9
            eff = eff_against(foe_row)
            dmg = (move.power / 250.0) * stab * eff * acc
            return w[0] * dmg + w[1] * eff / 4.0 + w[2] * acc
        if action.target == "none":
            # spread move: sum expected damage over visible foe actives
            total_eff, dmg = 0.0, 0.0
            hits_ally = move.target == "spread-all"
            for fs in (0, 1):
                foe_row = obs.current[6 + fs]
                if foe_row[layout.active] > 0 and foe_row[layout.fainted] == 0:
                    eff = eff_against(foe_row)
                    total_eff = max(total_eff, eff)
                    dmg += (move.power / 250.0) * 0.75 * stab * eff * acc
            if hits_ally:
                ally_row = obs.current[1 - slot]
                if ally_row[layout.active] > 0 and ally_row[layout.fainted] == 0:
                    dmg -= (move.power / 250.0) * 0.75 * acc
            return w[0] * dmg + w[1] * total_eff / 4.0 + w[2] * acc
        return -1e9  # deliberately hitting the ally is never scored up

    def act(self, obs: Observation, rng: np.random.Generator) -> JointAction:
        if obs.phase in ("TeamPreview1", "TeamPreview2"):
            legal = np.flatnonzero(obs.masks[0])
            return JointAction(int(legal[0]), int(legal[1]))
        layout = get_layout()
        foe_rows = [obs.current[6 + s] for s in (0, 1)
                    if obs.current[6 + s][layout.active] > 0]
        rows_by_team_slot = {}
        for r in range(6):
            ts = round(obs.current[r][layout.team_slot] * 5)
            rows_by_team_slot[int(ts)] = r
        m = pair_matrix(obs)
        picks = []
        for slot in (0, 1):
            legal = np.flatnonzero(obs.masks[slot])
            scores = [self._score(obs, slot, int(i), foe_rows, rows_by_team_slot)
                      for i in legal]
            picks.append(int(legal[int(np.argmax(scores))]))
        if m[picks[0], picks[1]]:
            return JointAction(picks[0], picks[1])
        # collision: re-pick slot b by score among pairs legal with slot a
        legal_b = np.flatnonzero(m[picks[0]])
        if len(legal_b):
            scores = [self._score(obs, 1, int(i), foe_rows, rows_by_team_slot)
                      for i in legal_b]
            return JointAction(picks[0], int(legal_b[int(np.argmax(scores))]))
        return complete_joint(obs, picks[0], picks[1], rng)

    def action_distribution(self, obs: Observation):
        a = self.act(obs, np.random.default_rng(0))
        return {tuple(a): 1.0}
