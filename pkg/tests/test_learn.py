"""Learning stack: GAE closed forms, Adam, the clipped surrogate, behavior
cloning, opponent samplers, rollout bookkeeping, and paradigm plumbing."""
import dataclasses

import numpy as np
import pytest

from doublesim.agents import (
    ArchDescriptor, RandomPlayer, init_params, pair_matrix, param_count)
from doublesim.engine import GameOptions, JointAction
from doublesim.errors import ConfigurationError, DataError
from doublesim.learn import (
    Adam, Dataset, DemoRecord, Hyperparameters, PPOState, RolloutBatch,
    SelfPlaySampler, UniformPoolSampler, WeightedPoolSampler,
    action_match_rate, bc_loss, bc_train, clip_grad_norm, collect_rollouts,
    compute_gae, desk_profile, ppo_update, run_paradigm)
from doublesim.learn import paradigm as paradigm_mod


# --- hyperparameters ----------------------------------------------------------

def test_default_hyperparameters_exact():
    h = Hyperparameters()
    assert h.learning_rate == 1e-5
    assert h.gamma == 1.0
    assert h.gae_lambda == 0.95
    assert h.clip_range == 0.2
    assert h.entropy_coef == 0.001
    assert h.value_coef == 0.5
    assert h.max_grad_norm == 0.5
    assert h.steps_per_update == 24 * 128
    assert h.batch_size == 64
    assert h.n_epochs == 10
    assert h.total_timesteps == 200_000
    h.validate()
    desk_profile().validate()


def test_hyperparameter_validation():
    with pytest.raises(ConfigurationError):
        dataclasses.replace(Hyperparameters(), gamma=1.5).validate()
    with pytest.raises(ConfigurationError):
        dataclasses.replace(Hyperparameters(), learning_rate=-1.0).validate()
    with pytest.raises(ConfigurationError):
        dataclasses.replace(Hyperparameters(), batch_size=0).validate()


# --- GAE ----------------------------------------------------------------------

def test_gae_lambda_one_is_discounted_return_minus_value():
    rewards = np.array([1.0, 0.0, 2.0, -1.0])
    values = np.array([0.3, -0.2, 0.5, 0.1])
    dones = np.array([False, False, False, True])
    gamma = 0.9
    adv, ret = compute_gae(rewards, values, dones, gamma, lam=1.0)
    returns = np.zeros(4)
    acc = 0.0
    for t in reversed(range(4)):
        acc = rewards[t] + gamma * acc
        returns[t] = acc
    assert np.allclose(adv, returns - values)
    assert np.allclose(ret, adv + values)


def test_gae_lambda_zero_is_td_error():
    rewards = np.array([0.5, 1.0, -0.5])
    values = np.array([0.2, 0.4, 0.6])
    dones = np.array([False, False, True])
    gamma = 0.8
    adv, _ = compute_gae(rewards, values, dones, gamma, lam=0.0)
    expected = [rewards[0] + gamma * values[1] - values[0],
                rewards[1] + gamma * values[2] - values[1],
                rewards[2] - values[2]]
    assert np.allclose(adv, expected)


def test_gae_done_blocks_bootstrap_and_truncation_uses_last_value():
    rewards = np.array([1.0, 0.0])
    values = np.array([0.0, 0.0])
    adv, _ = compute_gae(rewards, values, np.array([True, False]),
                         gamma=1.0, lam=1.0, last_value=10.0)
    assert adv[0] == 1.0          # done: no leak from the next episode
    assert adv[1] == 10.0         # truncated tail bootstraps last_value


# --- optimizer ----------------------------------------------------------------

def test_adam_first_step_is_signed_learning_rate():
    opt = Adam(3, learning_rate=0.1)
    params = np.zeros(3)
    grad = np.array([1.0, -2.0, 0.0])
    new = opt.step(params, grad)
    # bias-corrected first step: lr * grad / (|grad| + eps) ~ lr * sign(grad)
    assert np.allclose(new[:2], [-0.1, 0.1], atol=1e-6)
    assert new[2] == 0.0  # zero gradient: exactly zero step


def test_adam_descends_quadratic():
    opt = Adam(1, learning_rate=0.05)
    x = np.array([3.0])
    for _ in range(500):
        x = opt.step(x, 2 * x)
    assert abs(x[0]) < 1e-2


def test_clip_grad_norm():
    g = np.array([3.0, 4.0])
    clipped = clip_grad_norm(g, 1.0)
    assert np.linalg.norm(clipped) == pytest.approx(1.0)
    assert np.allclose(clipped, g / 5.0)
    assert np.array_equal(clip_grad_norm(g, 10.0), g)
    assert np.array_equal(clip_grad_norm(np.zeros(2), 1.0), np.zeros(2))


# --- rollouts -----------------------------------------------------------------

def _tiny_rollout(train_teams, n_steps=24, seed=0):
    desc = ArchDescriptor.default()
    rng = np.random.default_rng(seed)
    actor = init_params(desc, "actor", rng)
    critic = init_params(desc, "critic", rng)
    sampler = SelfPlaySampler(RandomPlayer())
    batch = collect_rollouts(actor, critic, desc, sampler, train_teams[:1],
                             n_steps, seed, GameOptions(skip_team_preview=True))
    return desc, actor, critic, batch


def test_rollout_reward_placement(train_teams):
    _, _, _, batch = _tiny_rollout(train_teams, n_steps=60)
    assert len(batch) >= 60
    for r, d in zip(batch.rewards, batch.dones):
        if d:
            assert r in (1.0, -1.0)   # terminal reward on the last step
        else:
            assert r == 0.0           # zero-sum game: no shaping anywhere
    assert sum(batch.dones) == len(batch.episode_rewards)
    assert len(batch.episode_seeds) >= len(batch.episode_rewards)


def test_rollout_log_probs_match_actions(train_teams):
    desc, actor, _, batch = _tiny_rollout(train_teams, n_steps=12)
    from doublesim.agents.network import log_prob
    for obs, action, lp in zip(batch.obs, batch.actions, batch.log_probs):
        assert pair_matrix(obs)[action.slot_a, action.slot_b]
        assert lp == pytest.approx(log_prob(actor, obs, action, desc))


def test_uniform_pool_sampler_frequency():
    policies = [object() for _ in range(4)]
    sampler = UniformPoolSampler(policies)
    rng = np.random.default_rng(0)
    counts = {id(p): 0 for p in policies}
    n = 10_000
    for _ in range(n):
        counts[id(sampler(rng))] += 1
    for c in counts.values():
        assert abs(c / n - 0.25) < 0.02
    with pytest.raises(ValueError):
        UniformPoolSampler([])


def test_weighted_pool_sampler_respects_weights():
    policies = [object(), object(), object()]
    sampler = WeightedPoolSampler(policies, np.array([0.0, 1.0, 3.0]))
    rng = np.random.default_rng(1)
    counts = [0, 0, 0]
    for _ in range(4000):
        counts[policies.index(sampler(rng))] += 1
    assert counts[0] == 0
    assert abs(counts[2] / 4000 - 0.75) < 0.03
    with pytest.raises(ValueError):
        WeightedPoolSampler(policies, np.array([1.0]))


# --- PPO surrogate ------------------------------------------------------------

def _fixed_ratio_batch(train_teams, log_ratio, reward, n=1, seed=3):
    """An n-step batch whose importance ratios are exactly exp(log_ratio)."""
    desc, actor, critic, batch = _tiny_rollout(train_teams, n_steps=n, seed=seed)
    batch.obs = batch.obs[:n]
    batch.actions = batch.actions[:n]
    batch.log_probs = [lp - log_ratio for lp in batch.log_probs[:n]]
    batch.values = [0.0] * n
    batch.rewards = [0.0] * (n - 1) + [reward]
    batch.dones = [False] * (n - 1) + [True]
    batch.last_value = 0.0
    return desc, actor, critic, batch


def _surrogate_hyper(**kw):
    base = dict(learning_rate=1e-2, gamma=1.0, gae_lambda=1.0, clip_range=0.2,
                entropy_coef=0.0, value_coef=0.5, max_grad_norm=1e9,
                steps_per_update=1, batch_size=1, n_epochs=1,
                total_timesteps=1)
    base.update(kw)
    return Hyperparameters(**base)


def test_clip_zeroes_gradient_when_ratio_high_and_advantage_positive(train_teams):
    # ratio 1.5 with eps 0.2 and A > 0: surrogate sits on the clipped branch
    # (1.2 * A), whose gradient in the parameters is exactly zero.
    desc, actor, critic, batch = _fixed_ratio_batch(train_teams,
                                                    np.log(1.5), reward=1.0)
    hyper = _surrogate_hyper()
    new_actor, _, diag = ppo_update(actor, critic, batch, hyper, desc, seed=0)
    assert np.array_equal(new_actor, actor)  # zero grad -> zero Adam step
    assert diag.clip_fraction == 1.0
    assert diag.policy_loss == pytest.approx(-1.2 * 1.0, rel=1e-6)


def test_unclipped_branch_moves_parameters(train_teams):
    # same ratio but A < 0: min picks ratio * A, gradient flows
    desc, actor, critic, batch = _fixed_ratio_batch(train_teams,
                                                    np.log(1.5), reward=-1.0)
    hyper = _surrogate_hyper()
    new_actor, _, diag = ppo_update(actor, critic, batch, hyper, desc, seed=0)
    assert not np.array_equal(new_actor, actor)
    assert diag.clip_fraction == 0.0
    assert diag.policy_loss == pytest.approx(1.5, rel=1e-6)


def test_zero_advantage_zero_entropy_leaves_actor_unchanged(train_teams):
    desc, actor, critic, batch = _fixed_ratio_batch(train_teams, 0.0,
                                                    reward=0.0, n=2)
    hyper = _surrogate_hyper(batch_size=2, steps_per_update=2,
                             total_timesteps=2)
    new_actor, new_critic, _ = ppo_update(actor, critic, batch, hyper, desc,
                                          seed=0)
    assert np.array_equal(new_actor, actor)
    assert not np.array_equal(new_critic, critic)  # value still regresses


# --- behavior cloning ---------------------------------------------------------

def test_bc_point_mass_memorization(train_teams):
    desc = ArchDescriptor.default()
    rng = np.random.default_rng(0)
    _, _, _, batch = _tiny_rollout(train_teams, n_steps=8)
    records = [DemoRecord(obs, act) for obs, act in
               zip(batch.obs, batch.actions)]
    dataset = Dataset(records)
    dataset.validate()
    init = init_params(desc, "actor", rng)
    loss_before = bc_loss(init, records, desc)
    params, losses = bc_train(dataset, init, desc, epochs=40,
                              learning_rate=1e-2, seed=0)
    assert len(losses) == 40 and losses[-1] < losses[0]
    assert bc_loss(params, records, desc) < loss_before
    assert action_match_rate(params, records, desc) >= 0.9


def test_bc_rejects_illegal_demonstrations(train_teams):
    _, _, _, batch = _tiny_rollout(train_teams, n_steps=2)
    obs = batch.obs[0]
    illegal = np.argwhere(~pair_matrix(obs))[0]
    bad = Dataset([DemoRecord(obs, JointAction(int(illegal[0]),
                                               int(illegal[1])))])
    with pytest.raises(DataError):
        bad.validate()


# --- paradigms ----------------------------------------------------------------

@pytest.mark.parametrize("paradigm", ["SP", "FP", "DO"])
def test_run_paradigm_smoke(train_teams, paradigm, monkeypatch):
    monkeypatch.setattr(paradigm_mod, "DO_GAMES_PER_PAIR", 4)
    hyper = dataclasses.replace(desk_profile(), steps_per_update=32,
                                batch_size=16, n_epochs=1, total_timesteps=64)
    pool = run_paradigm(paradigm, train_teams[:1], hyper, seed=1,
                        options=GameOptions(skip_team_preview=True))
    assert pool.paradigm == paradigm
    assert pool.members[0].step == 0
    assert pool.output.step >= hyper.total_timesteps
    assert pool.payoff.shape == (len(pool.members),) * 2
    assert len(pool.metrics) >= 2
    pool.output_policy()  # constructible


def test_run_paradigm_rejects_bad_inputs(train_teams):
    with pytest.raises(ConfigurationError):
        run_paradigm("XX", train_teams, desk_profile(), 0)
    with pytest.raises(ConfigurationError):
        run_paradigm("SP", [], desk_profile(), 0)


def test_pool_cap_thins_middle():
    desc = ArchDescriptor.default()
    pool = paradigm_mod.CheckpointPool(desc=desc)
    n_params = param_count(desc, "actor")
    for step in range(40):
        pool.add(np.full(n_params, float(step)), step)
    assert len(pool.members) == paradigm_mod.POOL_CAP
    assert pool.members[0].step == 0          # oldest anchor kept
    assert pool.members[-1].step == 39        # newest kept
    assert pool.payoff.shape == (paradigm_mod.POOL_CAP,) * 2
