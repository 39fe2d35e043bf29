"""Compact differentiable policy and value networks in plain numpy.

Architecture (per the design notes in the module docs): every observation row
goes through a shared affine embedding with a tanh nonlinearity, rows from
earlier frames receive a learned per-frame positional offset, the embeddings
are mean-pooled and concatenated with a learned aggregation vector, and two
tanh hidden layers feed either the two 107-way slot logit heads (actor) or a
scalar head (critic).  The joint action distribution is the product of the two
masked slot softmaxes restricted to jointly legal pairs and renormalized.

All gradients are computed analytically; finite-difference tests pin them.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from ..engine.actions import N_ACTIONS, JointAction
from ..engine.obs import Observation, frame_width
from ..errors import ArchitectureError, DataError
from .base import Policy, pair_matrix

NEG_INF = -1e30  # stands in for -inf so arithmetic stays finite


@dataclass(frozen=True)
class ArchDescriptor:
    """Shapes that determine the parameter layout."""

    frame_width: int
    n_frames: int = 1
    embed_width: int = 64
    hidden_width: int = 64
    n_actions: int = N_ACTIONS

    def hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @classmethod
    def default(cls, n_frames: int = 1) -> "ArchDescriptor":
        return cls(frame_width=frame_width(), n_frames=n_frames)


def _param_shapes(desc: ArchDescriptor, head: str) -> list[tuple[str, tuple]]:
    f, e, h = desc.frame_width, desc.embed_width, desc.hidden_width
    shapes = [
        ("w_embed", (f, e)),
        ("b_embed", (e,)),
        ("pos", (desc.n_frames, e)),
        ("agg", (e,)),
        ("w1", (2 * e, h)),
        ("b1", (h,)),
        ("w2", (h, h)),
        ("b2", (h,)),
    ]
    if head == "actor":
        shapes += [("w_a", (h, desc.n_actions)), ("b_a", (desc.n_actions,)),
                   ("w_b", (h, desc.n_actions)), ("b_b", (desc.n_actions,))]
    elif head == "critic":
        shapes += [("w_v", (h,)), ("b_v", (1,))]
    else:
        raise ArchitectureError(f"unknown head {head!r}")
    return shapes


def param_count(desc: ArchDescriptor, head: str) -> int:
    return sum(int(np.prod(s)) for _, s in _param_shapes(desc, head))


def unpack(params: np.ndarray, desc: ArchDescriptor, head: str
           ) -> dict[str, np.ndarray]:
    """Named views into a flat parameter vector (no copies)."""
    shapes = _param_shapes(desc, head)
    expected = sum(int(np.prod(s)) for _, s in shapes)
    if params.shape != (expected,):
        raise ArchitectureError(
            f"parameter vector has shape {params.shape}, expected ({expected},)")
    out, off = {}, 0
    for name, shape in shapes:
        n = int(np.prod(shape))
        out[name] = params[off:off + n].reshape(shape)
        off += n
    return out


def init_params(desc: ArchDescriptor, head: str,
                rng: np.random.Generator) -> np.ndarray:
    """Scaled-normal weights, zero biases and offsets."""
    parts = []
    for name, shape in _param_shapes(desc, head):
        if name.startswith("w"):
            scale = 1.0 / np.sqrt(shape[0] if len(shape) > 1 else shape[0])
            parts.append(rng.normal(0.0, scale, size=int(np.prod(shape))))
        else:
            parts.append(np.zeros(int(np.prod(shape))))
    return np.concatenate(parts)


# --- shared trunk ------------------------------------------------------------

def _trunk_forward(p: dict, obs: Observation, desc: ArchDescriptor) -> dict:
    frames = obs.frames
    if frames.shape != (desc.n_frames, 12, desc.frame_width):
        raise ArchitectureError(
            f"observation frames {frames.shape} do not match descriptor "
            f"({desc.n_frames}, 12, {desc.frame_width})")
    pre = frames @ p["w_embed"] + p["b_embed"] + p["pos"][:, None, :]
    emb = np.tanh(pre)  # (n_frames, 12, e)
    pooled = emb.mean(axis=(0, 1))
    z0 = np.concatenate([pooled, p["agg"]])
    h1 = np.tanh(z0 @ p["w1"] + p["b1"])
    h2 = np.tanh(h1 @ p["w2"] + p["b2"])
    return {"frames": frames, "emb": emb, "pooled": pooled, "z0": z0,
            "h1": h1, "h2": h2}


def _trunk_backward(p: dict, g: dict, cache: dict, d_h2: np.ndarray) -> None:
    """Accumulate trunk gradients into ``g`` given d loss / d h2."""
    h1, h2, z0, emb, frames = (cache["h1"], cache["h2"], cache["z0"],
                               cache["emb"], cache["frames"])
    d_pre2 = d_h2 * (1 - h2 ** 2)
    g["w2"] += np.outer(h1, d_pre2)
    g["b2"] += d_pre2
    d_h1 = p["w2"] @ d_pre2
    d_pre1 = d_h1 * (1 - h1 ** 2)
    g["w1"] += np.outer(z0, d_pre1)
    g["b1"] += d_pre1
    d_z0 = p["w1"] @ d_pre1
    e = emb.shape[-1]
    d_pooled = d_z0[:e]
    g["agg"] += d_z0[e:]
    n_rows = emb.shape[0] * emb.shape[1]
    d_pre0 = (d_pooled / n_rows) * (1 - emb ** 2)  # (n_frames, 12, e)
    g["w_embed"] += np.einsum("fri,frj->ij", frames, d_pre0)
    g["b_embed"] += d_pre0.sum(axis=(0, 1))
    g["pos"] += d_pre0.sum(axis=1)


# --- actor -------------------------------------------------------------------

def policy_forward(params: np.ndarray, obs: Observation,
                   desc: ArchDescriptor) -> tuple[np.ndarray, np.ndarray]:
    """Masked per-slot logits (2, 107) and joint log-probabilities.

    The joint log-probability matrix is (107, 107) with ``NEG_INF`` at
    illegal pairs; exp of the legal entries sums to 1.
    """
    logits, logp, _ = _policy_forward_cached(params, obs, desc)
    return logits, logp


def _policy_forward_cached(params, obs, desc):
    p = unpack(params, desc, "actor")
    cache = _trunk_forward(p, obs, desc)
    la = cache["h2"] @ p["w_a"] + p["b_a"]
    lb = cache["h2"] @ p["w_b"] + p["b_b"]
    mask = pair_matrix(obs)
    if not mask.any():
        raise DataError("observation admits no legal joint action")
    joint = la[:, None] + lb[None, :]
    joint = np.where(mask, joint, NEG_INF)
    m = joint.max()
    logz = m + np.log(np.exp(np.where(mask, joint - m, -np.inf)).sum())
    logp = np.where(mask, joint - logz, NEG_INF)
    logits = np.stack([np.where(mask.any(axis=1), la, NEG_INF),
                       np.where(mask.any(axis=0), lb, NEG_INF)])
    cache.update({"p": p, "la": la, "lb": lb, "mask": mask, "logp": logp})
    return logits, logp, cache


def joint_probabilities(params: np.ndarray, obs: Observation,
                        desc: ArchDescriptor) -> np.ndarray:
    _, logp = policy_forward(params, obs, desc)
    probs = np.where(logp > NEG_INF / 2, np.exp(logp), 0.0)
    return probs


def _accumulate_policy_grad(cache, g, d_la_extra, d_lb_extra) -> None:
    p = cache["p"]
    h2 = cache["h2"]
    g["w_a"] += np.outer(h2, d_la_extra)
    g["b_a"] += d_la_extra
    g["w_b"] += np.outer(h2, d_lb_extra)
    g["b_b"] += d_lb_extra
    d_h2 = p["w_a"] @ d_la_extra + p["w_b"] @ d_lb_extra
    _trunk_backward(p, g, cache, d_h2)


def _zero_grads(desc: ArchDescriptor, head: str) -> tuple[np.ndarray, dict]:
    flat = np.zeros(param_count(desc, head))
    return flat, unpack(flat, desc, head)


def policy_grad(params: np.ndarray,
                batch: list[tuple[Observation, JointAction, float]],
                desc: ArchDescriptor) -> np.ndarray:
    """Analytic gradient of sum_i coef_i * log pi(a_i | o_i)."""
    flat, g = _zero_grads(desc, "actor")
    for obs, action, coef in batch:
        a, b = action.slot_a, action.slot_b
        _, logp, cache = _policy_forward_cached(params, obs, desc)
        if not cache["mask"][a, b]:
            raise DataError(f"action ({a}, {b}) illegal in its observation")
        if coef == 0.0:
            continue
        probs = np.where(cache["mask"], np.exp(logp), 0.0)
        marg_a = probs.sum(axis=1)
        marg_b = probs.sum(axis=0)
        d_la = np.zeros(desc.n_actions)
        d_lb = np.zeros(desc.n_actions)
        d_la[a] = 1.0
        d_lb[b] = 1.0
        d_la -= marg_a
        d_lb -= marg_b
        _accumulate_policy_grad(cache, g, coef * d_la, coef * d_lb)
    return flat


def policy_entropy_grad(params: np.ndarray, batch: list[Observation],
                        desc: ArchDescriptor
                        ) -> tuple[float, np.ndarray]:
    """Sum of joint-distribution entropies over the batch, and its gradient."""
    flat, g = _zero_grads(desc, "actor")
    total = 0.0
    for obs in batch:
        _, logp, cache = _policy_forward_cached(params, obs, desc)
        mask = cache["mask"]
        probs = np.where(mask, np.exp(logp), 0.0)
        plogp = np.where(mask, probs * logp, 0.0)
        ent = -plogp.sum()
        total += ent
        # dH/d la_k = -sum_j p_kj log p_kj + marg_a_k * sum p log p
        s = plogp.sum()
        d_la = -plogp.sum(axis=1) + probs.sum(axis=1) * s
        d_lb = -plogp.sum(axis=0) + probs.sum(axis=0) * s
        _accumulate_policy_grad(cache, g, d_la, d_lb)
    return total, flat


def log_prob(params: np.ndarray, obs: Observation, action: JointAction,
             desc: ArchDescriptor) -> float:
    _, logp = policy_forward(params, obs, desc)
    val = logp[action.slot_a, action.slot_b]
    if val <= NEG_INF / 2:
        raise DataError(
            f"action ({action.slot_a}, {action.slot_b}) illegal in its observation")
    return float(val)


# --- critic ------------------------------------------------------------------

def value_forward(params: np.ndarray, obs: Observation,
                  desc: ArchDescriptor) -> float:
    p = unpack(params, desc, "critic")
    cache = _trunk_forward(p, obs, desc)
    return float(cache["h2"] @ p["w_v"] + p["b_v"][0])


def value_grad(params: np.ndarray,
               batch: list[tuple[Observation, float]],
               desc: ArchDescriptor) -> tuple[float, np.ndarray]:
    """Mean squared error against targets, and its gradient."""
    flat, g = _zero_grads(desc, "critic")
    total = 0.0
    n = len(batch)
    for obs, target in batch:
        p = unpack(params, desc, "critic")
        cache = _trunk_forward(p, obs, desc)
        v = float(cache["h2"] @ p["w_v"] + p["b_v"][0])
        err = v - target
        total += err ** 2
        d_v = 2.0 * err / n
        g["w_v"] += d_v * cache["h2"]
        g["b_v"] += d_v
        _trunk_backward(p, g, cache, d_v * p["w_v"])
    return total / n, flat


# --- policy wrapper ----------------------------------------------------------

class ParametricPolicy(Policy):
    """A ``Policy`` view over a flat actor parameter vector."""

    name = "parametric"

    def __init__(self, params: np.ndarray, desc: ArchDescriptor,
                 deterministic: bool = False) -> None:
        self.params = np.asarray(params, dtype=float)
        self.desc = desc
        self.deterministic = deterministic
        unpack(self.params, desc, "actor")  # validate shape eagerly

    def act(self, obs: Observation, rng: np.random.Generator) -> JointAction:
        probs = joint_probabilities(self.params, obs, self.desc)
        if self.deterministic:
            idx = int(np.argmax(probs))
        else:
            flat = probs.ravel()
            idx = int(rng.choice(len(flat), p=flat / flat.sum()))
        a, b = divmod(idx, self.desc.n_actions)
        return JointAction(a, b)

    def action_distribution(self, obs: Observation):
        probs = joint_probabilities(self.params, obs, self.desc)
        out = {}
        for a, b in np.argwhere(probs > 0):
            out[(int(a), int(b))] = float(probs[a, b])
        return out
