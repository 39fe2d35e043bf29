"""Policy interface and joint-action bookkeeping on top of observations.

Joint legality is decidable from the observation alone: the per-slot masks
plus three index-level rules (no duplicate switch target, at most one
terastallization, and the lone-replacement pass rule flagged on the
observation).  ``pair_matrix`` materializes that as a 107 x 107 boolean
matrix; scripted and parametric policies both build on it.
"""
from __future__ import annotations

import numpy as np

from ..engine.actions import N_ACTIONS, JointAction
from ..engine.obs import Observation

_TERA_LO, _TERA_HI = 87, 107
_SWITCH_LO, _SWITCH_HI = 1, 7


def pair_matrix(obs: Observation) -> np.ndarray:
    """Boolean legality matrix over joint (slot-a, slot-b) index pairs."""
    m = np.outer(obs.masks[0], obs.masks[1])
    if obs.phase in ("TeamPreview1", "TeamPreview2"):
        np.fill_diagonal(m, False)
        return m
    sw = np.arange(_SWITCH_LO, _SWITCH_HI)
    m[sw, sw] = False
    m[_TERA_LO:_TERA_HI, _TERA_LO:_TERA_HI] = False
    if obs.forbid_pass_pass:
        m[0, 0] = False
    return m


def legal_joint_pairs(obs: Observation) -> np.ndarray:
    """(k, 2) int array of legal joint index pairs."""
    return np.argwhere(pair_matrix(obs))


class Policy:
    """Maps observations to distributions over legal joint actions."""

    name = "policy"

    def act(self, obs: Observation, rng: np.random.Generator) -> JointAction:
        raise NotImplementedError

    def action_distribution(self, obs: Observation) -> dict[tuple[int, int], float]:
        raise NotImplementedError


def complete_joint(obs: Observation, pick_a: int, pick_b: int,
                   rng: np.random.Generator) -> JointAction:
    """Combine per-slot picks into a legal joint, repairing collisions by
    moving slot b to its best legal alternative."""
    m = pair_matrix(obs)
    if m[pick_a, pick_b]:
        return JointAction(pick_a, pick_b)
    legal_b = np.flatnonzero(m[pick_a])
    if len(legal_b):
        return JointAction(pick_a, int(legal_b[0]))
    pairs = np.argwhere(m)
    i = int(rng.integers(len(pairs)))
    return JointAction(int(pairs[i][0]), int(pairs[i][1]))
