"""Engine contracts: stat wiring, determinism, zero-sum, legality oracle,
preview enumeration, and the joint-action constraints."""
import copy
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from doublesim.agents import RandomPlayer
from doublesim.engine import (
    DEFAULT, FORFEIT, JointAction, N_ACTIONS, GameOptions, PASS, SlotAction,
    compute_stats, decode_action, encode_action, encode_observation,
    joint_legal, legal_slot_actions, start_battle, step)
from doublesim.engine.state import PHASE_PREVIEW1, PHASE_PREVIEW2, PHASE_TURN
from doublesim.errors import (ConfigurationError, IllegalActionError,
                              StateError, ValidationError)
from doublesim.gamedata import get_data
from doublesim.match import play_battle


# --- action index space -------------------------------------------------------

def test_action_encode_decode_round_trip():
    for index in range(N_ACTIONS):
        assert encode_action(decode_action(index)) == index
    assert decode_action(DEFAULT).kind == "default"
    assert decode_action(FORFEIT).kind == "forfeit"
    assert decode_action(PASS).kind == "pass"
    with pytest.raises(ValidationError):
        decode_action(107)
    with pytest.raises(ValidationError):
        decode_action(-3)


def test_action_block_arithmetic():
    # move 1, tera, first foe target: 7 + 20*4 + 0 + 3 = 90
    act = SlotAction("move", move_slot=1, target="foe-a", gimmick="tera")
    assert encode_action(act) == 90
    assert 87 <= encode_action(act) <= 106  # tera block
    assert encode_action(SlotAction("switch", switch_to=3)) == 3


# --- stats -------------------------------------------------------------------

def test_compute_stats_wiring(one_team):
    data = get_data()
    for mon in one_team.members:
        spec = data.species[data.species_index[mon.species]]
        nature = data.natures[data.nature_index[mon.stats.nature]]
        stats = compute_stats(mon)
        for i, key in enumerate(("hp", "atk", "def", "spa", "spd", "spe")):
            core = (2 * spec.base_stats[key] + 31 + mon.stats.units[i]) * 50 // 100
            if key == "hp":
                assert stats[key] == core + 60
            else:
                assert stats[key] == int(nature.multiplier(key) * (core + 5))


# --- determinism and zero-sum -------------------------------------------------

def _run_events(team, seed):
    result = play_battle((RandomPlayer(), RandomPlayer()), (team, team), seed)
    return result.events, result.winner


def test_same_seed_same_battle(one_team):
    e1, w1 = _run_events(one_team, 123)
    e2, w2 = _run_events(one_team, 123)
    assert e1 == e2 and w1 == w2
    e3, _ = _run_events(one_team, 124)
    assert e3 != e1


def test_thread_count_does_not_change_outcomes(one_team):
    seeds = list(range(40))
    with ThreadPoolExecutor(max_workers=1) as pool:
        serial = list(pool.map(lambda s: _run_events(one_team, s), seeds))
    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(lambda s: _run_events(one_team, s), seeds))
    assert serial == parallel


def test_battles_are_zero_sum_and_terminate(train_teams):
    rng = np.random.default_rng(7)
    for _ in range(50):
        t1, t2 = rng.choice(len(train_teams), size=2)
        result = play_battle((RandomPlayer(), RandomPlayer()),
                             (train_teams[t1], train_teams[t2]),
                             int(rng.integers(2 ** 31)))
        assert result.winner in (0, 1)  # exactly one winner: reward +1/-1
        assert result.events[-1][0] == "win"
        assert result.events[-1][1] == result.winner


def test_turn_cap_ends_battle(one_team):
    opts = GameOptions(skip_team_preview=True, turn_cap=3)
    state = start_battle(one_team, one_team, 5, opts)
    guard = 0
    while not state.terminal:
        step(state, JointAction(DEFAULT, DEFAULT), JointAction(DEFAULT, DEFAULT))
        guard += 1
        assert guard < 50
    assert state.turn <= opts.turn_cap + 1


def test_mirror_match_rejection(one_team, train_teams):
    opts = GameOptions(disable_mirror_matches=True)
    with pytest.raises(ConfigurationError):
        start_battle(one_team, one_team, 0, opts)
    start_battle(one_team, train_teams[1], 0, opts)  # distinct ids pass


def test_forfeit_short_circuits(one_team, fast_options):
    state = start_battle(one_team, one_team, 9, fast_options)
    _, reward = step(state, JointAction(FORFEIT, FORFEIT - 1 + 1),
                     JointAction(DEFAULT, DEFAULT))
    assert state.terminal and state.winner == 1


def test_step_terminal_raises(one_team, fast_options):
    state = start_battle(one_team, one_team, 9, fast_options)
    step(state, JointAction(FORFEIT, FORFEIT), JointAction(DEFAULT, DEFAULT))
    with pytest.raises(StateError):
        step(state, JointAction(DEFAULT, DEFAULT), JointAction(DEFAULT, DEFAULT))


def test_illegal_index_raises_with_slot(one_team, fast_options):
    state = start_battle(one_team, one_team, 9, fast_options)
    with pytest.raises(IllegalActionError) as err:
        step(state, JointAction(999, DEFAULT), JointAction(DEFAULT, DEFAULT))
    assert err.value.slot_index == 999


# --- preview enumeration ------------------------------------------------------

def test_preview_decision_count_is_90(one_team):
    """Distinct (lead set, bench set) outcomes over both preview phases."""
    state = start_battle(one_team, one_team, 0)
    assert state.phase == PHASE_PREVIEW1
    lead_mask = legal_slot_actions(state, 0, 0)
    leads = [i for i in range(N_ACTIONS) if lead_mask[i]]
    assert leads == [1, 2, 3, 4, 5, 6]
    outcomes = set()
    ordered_pairs = 0
    for a in leads:
        for b in leads:
            if joint_legal(state, 0, JointAction(a, b)):
                ordered_pairs += 1
    assert ordered_pairs == 30  # 6*5 ordered lead pairs
    for la in range(1, 7):
        for lb in range(la + 1, 7):
            s2 = start_battle(one_team, one_team, 0)
            step(s2, JointAction(la, lb), JointAction(1, 2))
            assert s2.phase == PHASE_PREVIEW2
            bench_mask = legal_slot_actions(s2, 0, 0)
            bench = [i for i in range(N_ACTIONS) if bench_mask[i]]
            assert len(bench) == 4 and la not in bench and lb not in bench
            for ba in bench:
                for bb in bench:
                    if joint_legal(s2, 0, JointAction(ba, bb)):
                        outcomes.add((frozenset((la, lb)), frozenset((ba, bb))))
    assert len(outcomes) == 90


def test_preview_duplicate_pick_is_illegal(one_team):
    state = start_battle(one_team, one_team, 0)
    assert not joint_legal(state, 0, JointAction(3, 3))
    with pytest.raises(IllegalActionError):
        step(state, JointAction(3, 3), JointAction(1, 2))


# --- legality oracle ----------------------------------------------------------

def oracle_slot_mask(state, player, slot):
    """Re-derivation of per-slot legality from the documented rules."""
    data = get_data()
    mask = np.zeros(N_ACTIONS, dtype=bool)
    side = state.sides[player]
    foe = state.sides[1 - player]
    if state.phase == PHASE_PREVIEW1:
        mask[1:7] = True
        return mask
    if state.phase == PHASE_PREVIEW2:
        for member in range(6):
            mask[member + 1] = member not in side.chosen
        return mask
    active_index = side.active[slot]
    mon = side.mons[active_index] if active_index is not None else None
    bench = [i for i in side.chosen
             if i not in side.active and not side.mons[i].fainted]
    if mon is None:
        mask[PASS] = True
        return mask
    if mon.fainted:
        if not bench:
            mask[PASS] = True
            return mask
        for i in bench:
            mask[i + 1] = True
        other_idx = side.active[1 - slot]
        other = side.mons[other_idx] if other_idx is not None else None
        if len(bench) == 1 and other is not None and other.fainted:
            mask[PASS] = True
        return mask
    for i in bench:
        mask[i + 1] = True
    cfg = side.team.members[active_index]
    any_move = False
    for m, move_name in enumerate(cfg.moves, start=1):
        move = data.moves[data.move_index[move_name]]
        if move.target == "single":
            targets = []
            for fslot, tcode in ((0, 3), (1, 4)):
                fidx = foe.active[fslot]
                if fidx is not None and not foe.mons[fidx].fainted:
                    targets.append(tcode)
            aidx = side.active[1 - slot]
            if aidx is not None and not side.mons[aidx].fainted:
                targets.append(1 - slot)
        else:
            targets = [2]
        for t in targets:
            mask[7 + 5 * (m - 1) + t] = True
            if not side.tera_used:
                mask[7 + 80 + 5 * (m - 1) + t] = True
            any_move = True
    if not any_move:
        mask[PASS] = True  # no usable move: the slot may stand idle
    return mask


def oracle_joint_legal(state, player, a, b):
    masks = [oracle_slot_mask(state, player, s) for s in (0, 1)]
    if not (masks[0][a] and masks[1][b]):
        return False
    if state.phase in (PHASE_PREVIEW1, PHASE_PREVIEW2):
        return a != b
    da, db = decode_action(a), decode_action(b)
    if da.kind == "switch" and db.kind == "switch" and da.switch_to == db.switch_to:
        return False
    if da.gimmick == "tera" and db.gimmick == "tera":
        return False
    if da.kind == "pass" and db.kind == "pass":
        side = state.sides[player]
        bench = [i for i in side.chosen
                 if i not in side.active and not side.mons[i].fainted]
        actives = [side.mons[i] if i is not None else None for i in side.active]
        if bench and all(m is not None and m.fainted for m in actives):
            return False
    return True


def assert_state_matches_oracle(state):
    for player in (0, 1):
        for slot in (0, 1):
            engine_mask = legal_slot_actions(state, player, slot)
            oracle = oracle_slot_mask(state, player, slot)
            assert np.array_equal(engine_mask, oracle), (player, slot)
        legal = [int(i) for i in np.flatnonzero(
            legal_slot_actions(state, player, 0) |
            legal_slot_actions(state, player, 1))]
        for a in legal:
            for b in legal:
                assert (joint_legal(state, player, JointAction(a, b))
                        == oracle_joint_legal(state, player, a, b)), (player, a, b)


def test_legality_matches_oracle_during_random_battles(train_teams):
    rng = np.random.default_rng(11)
    player = RandomPlayer()
    for game in range(6):
        t1, t2 = rng.choice(len(train_teams), size=2)
        state = start_battle(train_teams[t1], train_teams[t2],
                             int(rng.integers(2 ** 31)))
        while not state.terminal:
            assert_state_matches_oracle(state)
            acts = []
            for p in (0, 1):
                obs = encode_observation(state, p)
                acts.append(player.act(obs, rng))
            step(state, acts[0], acts[1])


def _two_mon_state(team, seed):
    """White-box state with only the two leads brought on each side."""
    state = start_battle(team, team, seed,
                         GameOptions(skip_team_preview=True))
    for side in state.sides:
        side.chosen = [side.active[0], side.active[1]]
    return state


def test_legality_oracle_exhaustive_depth3_two_mon_trees(one_team):
    """Every reachable state in capped depth-3 trees from 2-mon positions."""
    rng = np.random.default_rng(3)
    for root_seed in (1, 2, 3):
        frontier = [_two_mon_state(one_team, root_seed)]
        for _ in range(3):
            children = []
            for state in frontier:
                if state.terminal:
                    continue
                assert_state_matches_oracle(state)
                joints = []
                for p in (0, 1):
                    legal = [int(i) for i in np.flatnonzero(
                        legal_slot_actions(state, p, 0) |
                        legal_slot_actions(state, p, 1))]
                    pairs = [(a, b) for a in legal for b in legal
                             if joint_legal(state, p, JointAction(a, b))]
                    joints.append(pairs)
                combos = [(pa, pb) for pa in joints[0] for pb in joints[1]]
                picks = rng.choice(len(combos), size=min(3, len(combos)),
                                   replace=False)
                for k in picks:
                    (a1, b1), (a2, b2) = combos[int(k)]
                    child = copy.deepcopy(state)
                    step(child, JointAction(a1, b1), JointAction(a2, b2))
                    children.append(child)
            frontier = children
        for state in frontier:
            if not state.terminal:
                assert_state_matches_oracle(state)


# --- joint constraints through the observation --------------------------------

def test_forbid_pass_pass_consistency(train_teams):
    """Observation flag agrees with joint legality of the (pass, pass) pair."""
    rng = np.random.default_rng(21)
    player = RandomPlayer()
    seen_flag = False
    for game in range(30):
        t1, t2 = rng.choice(len(train_teams), size=2)
        state = start_battle(train_teams[t1], train_teams[t2],
                             int(rng.integers(2 ** 31)))
        while not state.terminal:
            for p in (0, 1):
                obs = encode_observation(state, p)
                if state.phase == PHASE_TURN and obs.masks[0][PASS] \
                        and obs.masks[1][PASS]:
                    allowed = joint_legal(state, p, JointAction(PASS, PASS))
                    assert allowed == (not obs.forbid_pass_pass)
                    seen_flag = seen_flag or obs.forbid_pass_pass
            acts = [player.act(encode_observation(state, p), rng)
                    for p in (0, 1)]
            step(state, acts[0], acts[1])
        if seen_flag:
            break
