"""PPO with generalized advantage estimation over disjoint actor/critic."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..agents.network import (ArchDescriptor, log_prob, policy_entropy_grad,
                              policy_grad, value_grad)
from ..errors import SolverError
from .hyper import Hyperparameters
from .optim import Adam, clip_grad_norm
from .rollout import RolloutBatch


def compute_gae(rewards: np.ndarray, values: np.ndarray, dones: np.ndarray,
                gamma: float, lam: float, last_value: float = 0.0
                ) -> tuple[np.ndarray, np.ndarray]:
    """Advantages and value targets (returns) for a flat rollout sequence."""
    n = len(rewards)
    adv = np.zeros(n)
    gae = 0.0
    for t in reversed(range(n)):
        if dones[t]:
            next_value, next_nonterminal = 0.0, 0.0
        elif t == n - 1:
            next_value, next_nonterminal = last_value, 1.0
        else:
            next_value, next_nonterminal = values[t + 1], 1.0
        delta = rewards[t] + gamma * next_value * next_nonterminal - values[t]
        gae = delta + gamma * lam * next_nonterminal * gae
        adv[t] = gae
    return adv, adv + values


@dataclass
class PPOState:
    """Optimizer state carried across updates."""

    actor_opt: Adam
    critic_opt: Adam

    @classmethod
    def create(cls, n_actor: int, n_critic: int,
               hyper: Hyperparameters) -> "PPOState":
        return cls(Adam(n_actor, hyper.learning_rate),
                   Adam(n_critic, hyper.learning_rate))


@dataclass
class PPODiagnostics:
    policy_loss: float = 0.0
    value_loss: float = 0.0
    entropy: float = 0.0
    clip_fraction: float = 0.0
    approx_kl: float = 0.0
    minibatches: int = 0
    extra: dict = field(default_factory=dict)


def ppo_update(actor_params: np.ndarray, critic_params: np.ndarray,
               batch: RolloutBatch, hyper: Hyperparameters,
               desc: ArchDescriptor, state: PPOState | None = None,
               seed: int = 0) -> tuple[np.ndarray, np.ndarray, PPODiagnostics]:
    """One PPO optimization phase over a collected rollout batch."""
    hyper.validate()
    if state is None:
        state = PPOState.create(len(actor_params), len(critic_params), hyper)
    rewards = np.asarray(batch.rewards)
    values = np.asarray(batch.values)
    dones = np.asarray(batch.dones, dtype=bool)
    adv, returns = compute_gae(rewards, values, dones, hyper.gamma,
                               hyper.gae_lambda, batch.last_value)
    old_logp = np.asarray(batch.log_probs)
    actor = np.array(actor_params, dtype=float)
    critic = np.array(critic_params, dtype=float)
    n = len(batch)
    rng = np.random.default_rng(seed)
    diag = PPODiagnostics()
    eps = hyper.clip_range
    for _ in range(hyper.n_epochs):
        order = rng.permutation(n)
        for start in range(0, n, hyper.batch_size):
            idx = order[start:start + hyper.batch_size]
            a = adv[idx]
            if len(a) > 1 and a.std() > 0:
                a = (a - a.mean()) / (a.std() + 1e-8)
            new_logp = np.array([
                log_prob(actor, batch.obs[i], batch.actions[i], desc)
                for i in idx])
            ratio = np.exp(new_logp - old_logp[idx])
            surr = np.minimum(ratio * a, np.clip(ratio, 1 - eps, 1 + eps) * a)
            policy_loss = -float(surr.mean())
            # gradient of the clipped surrogate: zero where the clip binds
            active = np.where(a > 0, ratio < 1 + eps, ratio > 1 - eps)
            coefs = np.where(active, ratio * a, 0.0) / len(idx)
            grad_batch = [(batch.obs[i], batch.actions[i], float(c))
                          for i, c in zip(idx, coefs)]
            pg = -policy_grad(actor, grad_batch, desc)
            ent_total, ent_grad = policy_entropy_grad(
                actor, [batch.obs[i] for i in idx], desc)
            entropy = ent_total / len(idx)
            g_actor = pg - hyper.entropy_coef * ent_grad / len(idx)
            v_loss, g_critic = value_grad(
                critic, [(batch.obs[i], float(returns[i])) for i in idx], desc)
            losses = (policy_loss, v_loss, entropy)
            if not all(np.isfinite(losses)):
                raise SolverError(
                    f"non-finite PPO loss: policy={policy_loss} "
                    f"value={v_loss} entropy={entropy} "
                    f"minibatch={diag.minibatches}")
            actor = state.actor_opt.step(
                actor, clip_grad_norm(g_actor, hyper.max_grad_norm))
            critic = state.critic_opt.step(
                critic,
                clip_grad_norm(hyper.value_coef * g_critic,
                               hyper.max_grad_norm))
            diag.policy_loss += policy_loss
            diag.value_loss += v_loss
            diag.entropy += entropy
            diag.clip_fraction += float(np.mean(~active))
            diag.approx_kl += float(np.mean(old_logp[idx] - new_logp))
            diag.minibatches += 1
    if diag.minibatches:
        for f in ("policy_loss", "value_loss", "entropy", "clip_fraction",
                  "approx_kl"):
            setattr(diag, f, getattr(diag, f) / diag.minibatches)
    return actor, critic, diag
