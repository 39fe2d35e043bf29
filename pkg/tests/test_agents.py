"""Scripted baseline players: uniformity, greedy oracles, relative strength."""
import numpy as np
import pytest
from scipy import stats

from doublesim.agents import (
    MaxBasePowerPlayer, RandomPlayer, SimpleHeuristicsPlayer, complete_joint,
    legal_joint_pairs, pair_matrix)
from doublesim.engine import (
    GameOptions, decode_action, encode_observation, joint_legal, start_battle,
    step)
from doublesim.gamedata import get_data
from doublesim.match import win_rate


# --- pair matrix --------------------------------------------------------------

def test_pair_matrix_agrees_with_joint_legal(train_teams):
    rng = np.random.default_rng(1)
    player = RandomPlayer()
    for game in range(4):
        state = start_battle(train_teams[0], train_teams[1],
                             int(rng.integers(2 ** 31)))
        while not state.terminal:
            for p in (0, 1):
                obs = encode_observation(state, p)
                m = pair_matrix(obs)
                from doublesim.engine import JointAction
                idx = np.flatnonzero(obs.masks[0] | obs.masks[1])
                for a in idx:
                    for b in idx:
                        assert m[a, b] == joint_legal(
                            state, p, JointAction(int(a), int(b)))
            acts = [player.act(encode_observation(state, p), rng)
                    for p in (0, 1)]
            step(state, acts[0], acts[1])


def test_complete_joint_always_legal(train_teams):
    rng = np.random.default_rng(5)
    state = start_battle(train_teams[0], train_teams[1], 42,
                         GameOptions(skip_team_preview=True))
    obs = encode_observation(state, 0)
    m = pair_matrix(obs)
    legal = np.flatnonzero(obs.masks[0] | obs.masks[1])
    for a in legal:
        for b in legal:
            joint = complete_joint(obs, int(a), int(b), rng)
            assert m[joint.slot_a, joint.slot_b]
            if m[a, b]:  # already-legal pairs come through untouched
                assert (joint.slot_a, joint.slot_b) == (a, b)


# --- random player ------------------------------------------------------------

def test_random_player_uniform_over_preview_pairs(one_team):
    """Chi-square on the 30 ordered lead pairs, 10k samples."""
    state = start_battle(one_team, one_team, 0)
    obs = encode_observation(state, 0)
    pairs = [tuple(p) for p in legal_joint_pairs(obs)]
    assert len(pairs) == 30
    rng = np.random.default_rng(99)
    player = RandomPlayer()
    counts = {p: 0 for p in pairs}
    n = 10_000
    for _ in range(n):
        a = player.act(obs, rng)
        counts[(a.slot_a, a.slot_b)] += 1
    chi2, pvalue = stats.chisquare(list(counts.values()))
    assert pvalue > 0.01


def test_random_player_uniform_in_turn_state(one_team):
    state = start_battle(one_team, one_team, 7,
                         GameOptions(skip_team_preview=True))
    obs = encode_observation(state, 0)
    pairs = [tuple(p) for p in legal_joint_pairs(obs)]
    rng = np.random.default_rng(3)
    player = RandomPlayer()
    counts = {p: 0 for p in pairs}
    n = 200 * len(pairs)
    for _ in range(n):
        a = player.act(obs, rng)
        counts[(a.slot_a, a.slot_b)] += 1
    _, pvalue = stats.chisquare(list(counts.values()))
    assert pvalue > 0.01
    dist = player.action_distribution(obs)
    assert all(abs(v - 1 / len(pairs)) < 1e-12 for v in dist.values())


# --- max base power -----------------------------------------------------------

def _slot_action_power(obs, slot, index):
    from doublesim.agents.scripted import _move_power
    action = decode_action(index)
    if action.kind != "move":
        return None
    return _move_power(obs, slot, action.move_slot)


def test_mbp_picks_highest_power_move_1000_states(train_teams):
    """Brute-force check: no legal move with strictly higher base power."""
    rng = np.random.default_rng(17)
    player = MaxBasePowerPlayer()
    checked = 0
    while checked < 1000:
        t1, t2 = rng.choice(len(train_teams), size=2)
        state = start_battle(train_teams[t1], train_teams[t2],
                             int(rng.integers(2 ** 31)),
                             GameOptions(skip_team_preview=True))
        while not state.terminal and checked < 1000:
            obs0 = encode_observation(state, 0)
            joint = player.act(obs0, rng)
            for slot, index in ((0, joint.slot_a), (1, joint.slot_b)):
                picked = _slot_action_power(obs0, slot, index)
                if picked is None:
                    continue
                legal_moves = [i for i in range(7, 27) if obs0.masks[slot][i]]
                best = max(_slot_action_power(obs0, slot, i)
                           for i in legal_moves)
                assert picked == best
                # foe target preferred among the chosen move's legal variants
                chosen_slot = decode_action(index).move_slot
                variants = {decode_action(i).target for i in legal_moves
                            if decode_action(i).move_slot == chosen_slot}
                if variants & {"foe-a", "foe-b"}:
                    assert decode_action(index).target in ("foe-a", "foe-b")
                checked += 1
            obs1 = encode_observation(state, 1)
            step(state, joint, player.act(obs1, rng))


# --- heuristics ---------------------------------------------------------------

def test_heuristics_is_deterministic(one_team):
    state = start_battle(one_team, one_team, 12,
                         GameOptions(skip_team_preview=True))
    obs = encode_observation(state, 0)
    player = SimpleHeuristicsPlayer()
    picks = {tuple(player.act(obs, np.random.default_rng(s)))
             for s in range(10)}
    assert len(picks) == 1
    assert list(player.action_distribution(obs).values()) == [1.0]


def test_heuristics_rejects_non_finite_weights():
    with pytest.raises(ValueError):
        SimpleHeuristicsPlayer(np.array([1.0, np.inf, 0, 0, 0]))


def test_heuristics_beats_random(train_teams):
    w = win_rate(SimpleHeuristicsPlayer(), RandomPlayer(),
                 train_teams, train_teams, n_games=100, seed=2024)
    assert w >= 0.70


def test_heuristics_beats_max_base_power(train_teams):
    w = win_rate(SimpleHeuristicsPlayer(), MaxBasePowerPlayer(),
                 train_teams, train_teams, n_games=100, seed=2024)
    assert w >= 0.55


def test_mbp_beats_random(train_teams):
    w = win_rate(MaxBasePowerPlayer(), RandomPlayer(),
                 train_teams, train_teams, n_games=100, seed=2024)
    assert w >= 0.65


def test_all_scripted_agents_survive_full_battles(train_teams, rng):
    from doublesim.match import play_battle
    players = [RandomPlayer(), MaxBasePowerPlayer(), SimpleHeuristicsPlayer()]
    for p1 in players:
        for p2 in players:
            result = play_battle((p1, p2), (train_teams[0], train_teams[1]),
                                 int(rng.integers(2 ** 31)))
            assert result.winner in (0, 1)
