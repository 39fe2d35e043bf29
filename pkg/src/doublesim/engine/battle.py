"""Turn resolution, legality masks, and the team-preview phases.

Resolution order within a turn: forfeits, then all switches (by effective
speed), then moves (by priority, then effective speed), then end-of-turn
residuals.  Speed ties are broken by a draw from the battle RNG; every
ordering comparison draws its tiebreak key in a fixed order, so the event
stream is a pure function of (teams, seed, options, actions).
"""
from __future__ import annotations

import numpy as np

from ..errors import IllegalActionError, StateError
from ..gamedata import get_data
from .. import _kernels
from .actions import (
    DEFAULT, FORFEIT, N_ACTIONS, JointAction, SlotAction, decode_action)
from .state import (
    PHASE_PREVIEW1, PHASE_PREVIEW2, PHASE_TERMINAL, PHASE_TURN,
    BattleState, BattlerState, SideState, decide_cap_winner)

CRIT_CHANCE = 1.0 / 24.0
FULL_PARA_CHANCE = 0.25

_STATUS_IMMUNE_TYPES = {"par": {"Electric"}, "brn": {"Fire"}, "psn": {"Poison", "Steel"}}
_SIDE_CONDITION_TURNS = {"tailwind": 4, "barrier": 5}


# --- small helpers ----------------------------------------------------------

def _cfg(side: SideState, mon: BattlerState):
    return side.team.members[mon.team_index]


def _current_types(side: SideState, mon: BattlerState) -> tuple[str, ...]:
    cfg = _cfg(side, mon)
    if mon.is_tera:
        return (cfg.tera_type,)
    return get_data().species[get_data().species_index[cfg.species]].types


def _ability(side: SideState, mon: BattlerState) -> str:
    return _cfg(side, mon).ability


def _item(side: SideState, mon: BattlerState) -> str | None:
    return _cfg(side, mon).item


def _move_for(side: SideState, mon: BattlerState, move_slot: int):
    cfg = _cfg(side, mon)
    if move_slot > len(cfg.moves):
        return None
    return get_data().moves[get_data().move_index[cfg.moves[move_slot - 1]]]


def _grounded(side: SideState, mon: BattlerState) -> bool:
    return ("Flying" not in _current_types(side, mon)
            and _ability(side, mon) != "Levitate")


def effective_speed(state: BattleState, player: int, mon: BattlerState) -> float:
    side = state.side(player)
    speed = mon.stats["spe"] * _kernels.boost_multiplier(mon.boosts["spe"])
    if _item(side, mon) == "Swift Scarf":
        speed *= 1.5
    if mon.status == "par":
        speed *= 0.5
    if side.conditions.get("tailwind", 0) > 0:
        speed *= 2.0
    return speed


def _clamp_boost(mon: BattlerState, stat: str, delta: int) -> int:
    old = mon.boosts[stat]
    new = max(-6, min(6, old + delta))
    mon.boosts[stat] = new
    return new - old


# --- legality ---------------------------------------------------------------

def legal_slot_actions(state: BattleState, player: int, slot: int) -> np.ndarray:
    """Boolean mask over the 107 per-slot action indices."""
    if state.terminal:
        raise StateError("no legal actions in a terminal state")
    mask = np.zeros(N_ACTIONS, dtype=bool)
    side = state.side(player)

    if state.phase == PHASE_PREVIEW1:
        mask[1:7] = True
        return mask
    if state.phase == PHASE_PREVIEW2:
        for i in range(6):
            mask[i + 1] = i not in side.chosen
        return mask

    mon = side.active_mon(slot)
    bench = side.bench()
    if mon is None:
        mask[0] = True
        return mask
    if mon.fainted:
        if bench:
            for i in bench:
                mask[i + 1] = True
            other = side.active_mon(1 - slot)
            if len(bench) == 1 and other is not None and other.fainted:
                mask[0] = True  # the lone replacement may go to the other slot
        else:
            mask[0] = True
        return mask

    for i in bench:
        mask[i + 1] = True

    foe = state.side(1 - player)
    cfg = _cfg(side, mon)
    any_move = False
    for m in range(1, len(cfg.moves) + 1):
        move = _move_for(side, mon, m)
        targets: list[int] = []
        if move.target == "single":
            if foe.slot_occupied(0):
                targets.append(3)
            if foe.slot_occupied(1):
                targets.append(4)
            ally_slot = 1 - slot
            if side.slot_occupied(ally_slot):
                targets.append(ally_slot)  # 0 = ally-a, 1 = ally-b
        else:
            targets.append(2)  # explicit no-target
        for t in targets:
            base = 7 + 5 * (m - 1) + t
            mask[base] = True
            if not side.tera_used:
                mask[base + 80] = True  # tera block offset: 20 * 4
            any_move = True

    if not any_move:
        # no usable move (e.g. every target slot is fainted or empty): the
        # slot may stand idle, which also keeps a lone bench replacement
        # available for a force-switching ally
        mask[0] = True
    return mask


def joint_legal(state: BattleState, player: int, action: JointAction) -> bool:
    """Total check of a joint action, including cross-slot constraints."""
    if state.terminal:
        return False
    try:
        masks = [legal_slot_actions(state, player, s) for s in (0, 1)]
    except StateError:
        return False
    decoded = []
    for s, idx in enumerate(action):
        if idx == DEFAULT or idx == FORFEIT:
            if state.phase != PHASE_TURN:
                return False
            decoded.append(None)
            continue
        if not 0 <= idx < N_ACTIONS or not masks[s][idx]:
            return False
        decoded.append(decode_action(idx))
    if state.phase in (PHASE_PREVIEW1, PHASE_PREVIEW2):
        return action.slot_a != action.slot_b
    a, b = decoded
    if a and b and a.kind == "switch" and b.kind == "switch" \
            and a.switch_to == b.switch_to:
        return False
    if a and b and a.gimmick == "tera" and b.gimmick == "tera":
        return False  # one terastallization per side per battle
    if a and b and a.kind == "pass" and b.kind == "pass":
        side = state.side(player)
        mons = [side.active_mon(s) for s in (0, 1)]
        if (side.bench() and all(m is not None and m.fainted for m in mons)):
            return False  # someone must take the lone replacement
    return True


def _normalize(state: BattleState, player: int, action: JointAction) -> JointAction:
    """Resolve default sentinels to the first jointly legal combination."""
    if DEFAULT not in tuple(action):
        return action
    cand_a = ([action.slot_a] if action.slot_a != DEFAULT
              else [int(i) for i in np.flatnonzero(legal_slot_actions(state, player, 0))])
    cand_b = ([action.slot_b] if action.slot_b != DEFAULT
              else [int(i) for i in np.flatnonzero(legal_slot_actions(state, player, 1))])
    for a in cand_a:
        for b in cand_b:
            joint = JointAction(a, b)
            if joint_legal(state, player, joint):
                return joint
    return JointAction(cand_a[0], cand_b[0])


def _check_joint(state: BattleState, player: int, action: JointAction) -> None:
    for s, idx in enumerate(action):
        if idx in (DEFAULT, FORFEIT):
            continue
        ok = 0 <= idx < N_ACTIONS and legal_slot_actions(state, player, s)[idx]
        if not ok:
            raise IllegalActionError(
                f"player {player + 1} slot {'ab'[s]}: index {idx} is illegal",
                slot_index=idx)
    if not joint_legal(state, player, action):
        raise IllegalActionError(
            f"player {player + 1}: joint action {tuple(action)} violates a "
            "cross-slot constraint", slot_index=action.slot_b)


# --- preview ----------------------------------------------------------------

def apply_preview(state: BattleState, player: int,
                  leads: tuple[int, int], bench: tuple[int, int]) -> None:
    side = state.side(player)
    side.chosen = [leads[0], leads[1], bench[0], bench[1]]


def begin_turn_phase(state: BattleState) -> list[tuple]:
    events: list[tuple] = []
    for player in (0, 1):
        side = state.side(player)
        events.append(("preview", player,
                       f"{side.chosen[0] + 1},{side.chosen[1] + 1}",
                       f"{side.chosen[2] + 1},{side.chosen[3] + 1}"))
    state.phase = PHASE_TURN
    for player in (0, 1):
        side = state.side(player)
        for slot in (0, 1):
            _send_out(state, player, slot, side.chosen[slot], events)
    for player in (0, 1):
        for slot in (0, 1):
            _entry_ability(state, player, slot, events)
    state.turn = 1
    events.append(("turn", 1))
    state.history.extend(events)
    return events


def _send_out(state: BattleState, player: int, slot: int, team_index: int,
              events: list[tuple]) -> None:
    side = state.side(player)
    side.active[slot] = team_index
    mon = side.mons[team_index]
    mon.revealed = True
    events.append(("switch", player, slot, team_index + 1,
                   _cfg(side, mon).species, mon.hp, mon.max_hp))


def _entry_ability(state: BattleState, player: int, slot: int,
                   events: list[tuple]) -> None:
    side = state.side(player)
    mon = side.active_mon(slot)
    if mon is None or mon.fainted or _ability(side, mon) != "Intimidate":
        return
    events.append(("-ability", player, slot, "Intimidate"))
    foe = state.side(1 - player)
    for fslot in (0, 1):
        target = foe.active_mon(fslot)
        if target is None or target.fainted:
            continue
        delta = _clamp_boost(target, "atk", -1)
        if delta:
            events.append(("-unboost", 1 - player, fslot, "atk", -delta))


# --- step -------------------------------------------------------------------

def step(state: BattleState, a1: JointAction, a2: JointAction
         ) -> tuple[list[tuple], int | None]:
    """Advance one decision point.  Returns (events, terminal reward)."""
    if state.terminal:
        raise StateError("cannot step a terminal battle")
    actions = [a1, a2]
    for player in (0, 1):
        _check_joint(state, player, actions[player])

    if state.phase in (PHASE_PREVIEW1, PHASE_PREVIEW2):
        return _step_preview(state, actions)

    actions = [_normalize(state, p, actions[p]) for p in (0, 1)]

    # forfeit short-circuits the turn
    forfeits = [FORFEIT in tuple(actions[p]) for p in (0, 1)]
    if any(forfeits):
        events: list[tuple] = []
        if all(forfeits):
            winner = int(state.rng.integers(2))
        else:
            winner = 1 if forfeits[0] else 0
        return _finish(state, winner, events)

    return _step_turn(state, actions)


def _step_preview(state: BattleState, actions: list[JointAction]
                  ) -> tuple[list[tuple], int | None]:
    events: list[tuple] = []
    picks = [(a.slot_a - 1, a.slot_b - 1) for a in actions]
    if state.phase == PHASE_PREVIEW1:
        for player in (0, 1):
            state.side(player).chosen = list(picks[player])
        state.phase = PHASE_PREVIEW2
        state.history.extend(events)
        return events, None
    for player in (0, 1):
        side = state.side(player)
        apply_preview(state, player, tuple(side.chosen), picks[player])
    return begin_turn_phase(state), None


def _step_turn(state: BattleState, actions: list[JointAction]
               ) -> tuple[list[tuple], int | None]:
    events: list[tuple] = []
    for player in (0, 1):
        for slot in (0, 1):
            mon = state.side(player).active_mon(slot)
            if mon is not None:
                mon.protected_last_turn = mon.protected
                mon.protected = False

    decoded = {}
    for player in (0, 1):
        for slot, idx in enumerate(actions[player]):
            decoded[(player, slot)] = decode_action(idx)

    # switches first, ordered by effective speed
    switchers = [(p, s) for (p, s), a in decoded.items() if a.kind == "switch"]
    for p, s in _speed_order(state, switchers):
        _perform_switch(state, p, s, decoded[(p, s)].switch_to - 1, events)

    # then moves, by priority bracket and effective speed
    movers = [(p, s) for (p, s), a in decoded.items() if a.kind == "move"]
    ordered = _speed_order(state, movers, with_priority=decoded)
    for k, (p, s) in enumerate(ordered):
        _execute_move(state, p, s, decoded[(p, s)], events)
        winner = _eliminated_winner(state)
        if winner is not None:
            # record the never-performed choices so logs stay reconstructible
            for lp, ls in ordered[k + 1:]:
                a = decoded[(lp, ls)]
                side = state.side(lp)
                mon = side.active_mon(ls)
                move = _move_for(side, mon, a.move_slot) if mon else None
                events.append(("cant", lp, ls, "unacted",
                               move.name if move else "?", a.target,
                               a.gimmick))
            return _finish(state, winner, events)

    _end_of_turn(state, events)
    winner = _eliminated_winner(state)
    if winner is not None:
        return _finish(state, winner, events)

    if state.turn >= state.options.turn_cap:
        return _finish(state, decide_cap_winner(state), events)

    state.turn += 1
    events.append(("turn", state.turn))
    state.history.extend(events)
    return events, None


def _speed_order(state: BattleState, actors: list[tuple[int, int]],
                 with_priority: dict | None = None) -> list[tuple[int, int]]:
    """Sort actors fastest-first; every actor draws one RNG tiebreak key."""
    keyed = []
    for p, s in sorted(actors):
        mon = state.side(p).active_mon(s)
        speed = 0.0
        if mon is not None and not mon.fainted:
            speed = effective_speed(state, p, mon)
        prio = 0
        if with_priority is not None:
            action = with_priority[(p, s)]
            side = state.side(p)
            if mon is not None:
                move = _move_for(side, mon, action.move_slot)
                if move is not None:
                    prio = move.priority
        tiebreak = float(state.rng.random())
        keyed.append(((-prio, -speed, tiebreak), (p, s)))
    keyed.sort(key=lambda kv: kv[0])
    return [actor for _, actor in keyed]


def _perform_switch(state: BattleState, player: int, slot: int,
                    team_index: int, events: list[tuple]) -> None:
    side = state.side(player)
    out = side.active_mon(slot)
    if out is not None and not out.fainted:
        out.reset_on_switch_out()
    _send_out(state, player, slot, team_index, events)
    _entry_ability(state, player, slot, events)


def _execute_move(state: BattleState, player: int, slot: int,
                  action: SlotAction, events: list[tuple]) -> None:
    side = state.side(player)
    mon = side.active_mon(slot)
    move = None
    if mon is not None:
        move = _move_for(side, mon, action.move_slot)
    if move is None or mon.fainted:
        # keep the intended choice in the log for exact reconstruction
        name = move.name if move is not None else "?"
        events.append(("cant", player, slot, "faint", name, action.target,
                       action.gimmick))
        return
    if mon.status == "par" and state.rng.random() < FULL_PARA_CHANCE:
        events.append(("cant", player, slot, "par", move.name, action.target,
                       action.gimmick))
        return

    if action.gimmick == "tera" and not side.tera_used:
        side.tera_used = True
        mon.is_tera = True
        events.append(("-terastallize", player, slot, _cfg(side, mon).tera_type))

    mon.revealed_moves.add(move.name)
    events.append(("move", player, slot, move.name, action.target))

    if move.accuracy < 100 and state.rng.random() * 100.0 >= move.accuracy:
        events.append(("-miss", player, slot))
        return

    if move.category == "status":
        _execute_status_move(state, player, slot, mon, move, action, events)
    else:
        _execute_damaging_move(state, player, slot, mon, move, action, events)


def _resolve_targets(state: BattleState, player: int, slot: int,
                     move, token: str) -> list[tuple[int, int]]:
    side = state.side(player)
    foe_player = 1 - player
    foe = state.side(foe_player)
    if move.target == "self":
        return [(player, slot)]
    if move.target == "spread-foes":
        return [(foe_player, s) for s in (0, 1) if foe.slot_occupied(s)]
    if move.target == "spread-all":
        out = [(foe_player, s) for s in (0, 1) if foe.slot_occupied(s)]
        ally = 1 - slot
        if side.slot_occupied(ally):
            out.append((player, ally))
        return out
    # single target with redirection when the intended slot is gone
    if token in ("foe-a", "foe-b"):
        want = 0 if token == "foe-a" else 1
        if foe.slot_occupied(want):
            return [(foe_player, want)]
        if foe.slot_occupied(1 - want):
            return [(foe_player, 1 - want)]
        return []
    if token in ("ally-a", "ally-b"):
        want = 0 if token == "ally-a" else 1
        if want != slot and side.slot_occupied(want):
            return [(player, want)]
        return []
    return []


def _immunity(state: BattleState, tplayer: int, mon: BattlerState, move) -> str | None:
    side = state.side(tplayer)
    if move.type == "Water" and _ability(side, mon) == "Water Absorb":
        return "Water Absorb"
    if move.type == "Ground" and _ability(side, mon) == "Levitate":
        return "Levitate"
    if get_data().effectiveness(move.type, _current_types(side, mon)) == 0.0:
        return "type"
    return None


def _stab_multiplier(side: SideState, mon: BattlerState, move) -> float:
    cfg = _cfg(side, mon)
    data = get_data()
    base_types = data.species[data.species_index[cfg.species]].types
    natural = move.type in base_types
    if mon.is_tera and move.type == cfg.tera_type:
        return 2.0 if natural else 1.5
    return 1.5 if natural else 1.0


def _offense_defense(state: BattleState, aside: SideState, attacker: BattlerState,
                     dside: SideState, defender: BattlerState, move
                     ) -> tuple[int, int]:
    if move.category == "physical":
        atk = attacker.stats["atk"] * _kernels.boost_multiplier(attacker.boosts["atk"])
        if _item(aside, attacker) == "Power Band":
            atk *= 1.5
        dfn = defender.stats["def"] * _kernels.boost_multiplier(defender.boosts["def"])
    else:
        atk = attacker.stats["spa"] * _kernels.boost_multiplier(attacker.boosts["spa"])
        if _item(aside, attacker) == "Power Lens":
            atk *= 1.5
        dfn = defender.stats["spd"] * _kernels.boost_multiplier(defender.boosts["spd"])
        if _item(dside, defender) == "Guard Vest":
            dfn *= 1.5
    return max(1, int(atk)), max(1, int(dfn))


def _weather_terrain_mult(state: BattleState, aside: SideState,
                          attacker: BattlerState, move) -> float:
    mult = 1.0
    if state.weather == "rain":
        if move.type == "Water":
            mult *= 1.5
        elif move.type == "Fire":
            mult *= 0.5
    elif state.weather == "sun":
        if move.type == "Fire":
            mult *= 1.5
        elif move.type == "Water":
            mult *= 0.5
    if (state.terrain == "grassy" and move.type == "Grass"
            and _grounded(aside, attacker)):
        mult *= 1.3
    return mult


def _apply_damage(state: BattleState, tplayer: int, tslot: int,
                  mon: BattlerState, dmg: int, events: list[tuple]) -> int:
    side = state.side(tplayer)
    if dmg >= mon.hp:
        if mon.hp == mon.max_hp and _ability(side, mon) == "Sturdy":
            dmg = mon.hp - 1
            events.append(("-ability", tplayer, tslot, "Sturdy"))
        elif (mon.hp == mon.max_hp and _item(side, mon) == "Last Guard"
              and not mon.item_used):
            dmg = mon.hp - 1
            mon.item_used = True
            events.append(("-item", tplayer, tslot, "Last Guard"))
        else:
            dmg = mon.hp
    mon.hp -= dmg
    events.append(("-damage", tplayer, tslot, mon.hp, mon.max_hp))
    if mon.hp == 0:
        mon.fainted = True
        events.append(("faint", tplayer, tslot))
    elif (_item(side, mon) == "Tonic Berry" and not mon.item_used
          and mon.hp * 2 <= mon.max_hp):
        mon.item_used = True
        heal = mon.max_hp // 4
        mon.hp = min(mon.max_hp, mon.hp + heal)
        events.append(("-item", tplayer, tslot, "Tonic Berry"))
        events.append(("-heal", tplayer, tslot, mon.hp, mon.max_hp))
    return dmg


def _apply_status(state: BattleState, tplayer: int, tslot: int,
                  mon: BattlerState, status: str, events: list[tuple]) -> bool:
    side = state.side(tplayer)
    if mon.status is not None or mon.fainted:
        return False
    if set(_current_types(side, mon)) & _STATUS_IMMUNE_TYPES[status]:
        events.append(("-immune", tplayer, tslot, "status"))
        return False
    mon.status = status
    events.append(("-status", tplayer, tslot, status))
    return True


def _apply_boosts(state: BattleState, tplayer: int, tslot: int,
                  mon: BattlerState, boosts: dict[str, int],
                  events: list[tuple]) -> None:
    for stat in sorted(boosts):
        delta = _clamp_boost(mon, stat, boosts[stat])
        if delta > 0:
            events.append(("-boost", tplayer, tslot, stat, delta))
        elif delta < 0:
            events.append(("-unboost", tplayer, tslot, stat, -delta))


def _execute_damaging_move(state: BattleState, player: int, slot: int,
                           mon: BattlerState, move, action: SlotAction,
                           events: list[tuple]) -> None:
    side = state.side(player)
    targets = _resolve_targets(state, player, slot, move, action.target)
    if not targets:
        events.append(("-fail", player, slot))
        return
    live = [(tp, ts) for tp, ts in targets
            if not state.side(tp).active_mon(ts).protected]
    spread = len(targets) > 1
    total_dealt = 0
    hit_any = False
    for tp, ts in targets:
        tside = state.side(tp)
        target = tside.active_mon(ts)
        if target.protected:
            events.append(("-activate", tp, ts, "Protect"))
            continue
        immune = _immunity(state, tp, target, move)
        if immune is not None:
            events.append(("-immune", tp, ts, immune))
            if immune == "Water Absorb" and target.hp < target.max_hp:
                target.hp = min(target.max_hp, target.hp + target.max_hp // 4)
                events.append(("-heal", tp, ts, target.hp, target.max_hp))
            continue
        crit = state.rng.random() < CRIT_CHANCE
        roll = int(state.rng.integers(_kernels.ROLL_COUNT))
        atk, dfn = _offense_defense(state, side, mon, tside, target, move)
        screen = 0.5 if (move.category == "physical"
                         and tside.conditions.get("barrier", 0) > 0
                         and tp != player) else 1.0
        ability_mult = 0.5 if (_ability(tside, target) == "Thick Fat"
                               and move.type in ("Fire", "Ice")) else 1.0
        dmg = _kernels.damage_amount(
            move.power, atk, dfn, 50,
            _stab_multiplier(side, mon, move),
            get_data().effectiveness(move.type, _current_types(tside, target)),
            crit, roll, spread and len(live) > 1,
            _weather_terrain_mult(state, side, mon, move),
            screen,
            1.3 if _item(side, mon) == "Vigor Orb" else 1.0,
            ability_mult,
            mon.status == "brn" and move.category == "physical")
        if crit:
            events.append(("-crit", tp, ts))
        dealt = _apply_damage(state, tp, ts, target, dmg, events)
        total_dealt += dealt
        hit_any = True
        effect = move.effect
        if not target.fainted and effect.get("chance"):
            if state.rng.random() * 100.0 < effect["chance"]:
                if "status" in effect:
                    _apply_status(state, tp, ts, target, effect["status"], events)
                elif "boosts" in effect:
                    _apply_boosts(state, tp, ts, target, effect["boosts"], events)
    if not hit_any:
        return
    effect = move.effect
    if "drain" in effect and total_dealt > 0 and not mon.fainted:
        heal = max(1, total_dealt * effect["drain"] // 100)
        if mon.hp < mon.max_hp:
            mon.hp = min(mon.max_hp, mon.hp + heal)
            events.append(("-heal", player, slot, mon.hp, mon.max_hp))
    if "self_boosts" in effect and not mon.fainted:
        _apply_boosts(state, player, slot, mon, effect["self_boosts"], events)
    if _item(side, mon) == "Vigor Orb" and not mon.fainted:
        recoil = max(1, mon.max_hp // 10)
        _apply_damage(state, player, slot, mon, min(recoil, mon.hp), events)


def _execute_status_move(state: BattleState, player: int, slot: int,
                         mon: BattlerState, move, action: SlotAction,
                         events: list[tuple]) -> None:
    side = state.side(player)
    effect = move.effect
    if effect.get("protect"):
        if mon.protected_last_turn:
            events.append(("-fail", player, slot))
        else:
            mon.protected = True
            events.append(("-singleturn", player, slot, "Protect"))
        return
    if "self_boosts" in effect:
        _apply_boosts(state, player, slot, mon, effect["self_boosts"], events)
        return
    if "heal" in effect:
        if mon.hp == mon.max_hp:
            events.append(("-fail", player, slot))
        else:
            mon.hp = min(mon.max_hp, mon.hp + mon.max_hp * effect["heal"] // 100)
            events.append(("-heal", player, slot, mon.hp, mon.max_hp))
        return
    if "side" in effect:
        name = effect["side"]
        if side.conditions.get(name, 0) > 0:
            events.append(("-fail", player, slot))
        else:
            side.conditions[name] = effect["turns"]
            events.append(("-sidestart", player, name, effect["turns"]))
        return
    if "weather" in effect:
        if state.weather == effect["weather"]:
            events.append(("-fail", player, slot))
        else:
            state.weather = effect["weather"]
            state.weather_turns = effect["turns"]
            events.append(("-weather", effect["weather"], effect["turns"]))
        return
    if "terrain" in effect:
        if state.terrain == effect["terrain"]:
            events.append(("-fail", player, slot))
        else:
            state.terrain = effect["terrain"]
            state.terrain_turns = effect["turns"]
            events.append(("-fieldstart", effect["terrain"], effect["turns"]))
        return
    # targeted status move (paralysis / poison inducers)
    targets = _resolve_targets(state, player, slot, move, action.target)
    if not targets:
        events.append(("-fail", player, slot))
        return
    for tp, ts in targets:
        target = state.side(tp).active_mon(ts)
        if target.protected:
            events.append(("-activate", tp, ts, "Protect"))
            continue
        if "status" in effect:
            if not _apply_status(state, tp, ts, target, effect["status"], events):
                if not (set(_current_types(state.side(tp), target))
                        & _STATUS_IMMUNE_TYPES[effect["status"]]):
                    events.append(("-fail", player, slot))
        elif "boosts" in effect:
            _apply_boosts(state, tp, ts, target, effect["boosts"], events)


def _end_of_turn(state: BattleState, events: list[tuple]) -> None:
    if state.weather is not None:
        state.weather_turns -= 1
        if state.weather_turns <= 0:
            events.append(("-weatherend", state.weather))
            state.weather = None
    if state.terrain is not None:
        if state.terrain == "grassy":
            for player in (0, 1):
                side = state.side(player)
                for slot in (0, 1):
                    m = side.active_mon(slot)
                    if (m is not None and not m.fainted and m.hp < m.max_hp
                            and _grounded(side, m)):
                        m.hp = min(m.max_hp, m.hp + m.max_hp // 16)
                        events.append(("-heal", player, slot, m.hp, m.max_hp))
        state.terrain_turns -= 1
        if state.terrain_turns <= 0:
            events.append(("-fieldend", state.terrain))
            state.terrain = None
    for player in (0, 1):
        side = state.side(player)
        for name in list(side.conditions):
            side.conditions[name] -= 1
            if side.conditions[name] <= 0:
                del side.conditions[name]
                events.append(("-sideend", player, name))
    for player in (0, 1):
        side = state.side(player)
        for slot in (0, 1):
            m = side.active_mon(slot)
            if m is None or m.fainted:
                continue
            if m.status == "brn":
                _apply_damage(state, player, slot, m,
                              min(m.hp, max(1, m.max_hp // 16)), events)
            elif m.status == "psn":
                _apply_damage(state, player, slot, m,
                              min(m.hp, max(1, m.max_hp // 8)), events)
            if m.fainted:
                continue
            if _item(side, m) == "Herb Snack" and m.hp < m.max_hp:
                m.hp = min(m.max_hp, m.hp + max(1, m.max_hp // 16))
                events.append(("-heal", player, slot, m.hp, m.max_hp))
            if _ability(side, m) == "Swift Soul":
                delta = _clamp_boost(m, "spe", 1)
                if delta:
                    events.append(("-boost", player, slot, "spe", delta))


def _eliminated_winner(state: BattleState) -> int | None:
    alive = [len(state.side(p).alive_chosen()) for p in (0, 1)]
    if alive[0] > 0 and alive[1] > 0:
        return None
    if alive[0] == 0 and alive[1] == 0:
        return decide_cap_winner(state)
    return 0 if alive[1] == 0 else 1


def _finish(state: BattleState, winner: int, events: list[tuple]
            ) -> tuple[list[tuple], int]:
    state.phase = PHASE_TERMINAL
    state.winner = winner
    events.append(("win", winner))
    state.history.extend(events)
    return events, 1 if winner == 0 else -1
