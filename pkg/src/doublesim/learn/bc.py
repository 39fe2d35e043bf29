"""Behavior cloning: negative log-likelihood minimization over demonstrations."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..agents.base import pair_matrix
from ..agents.network import ArchDescriptor, log_prob, policy_grad
from ..engine.actions import JointAction
from ..engine.obs import Observation
from ..errors import DataError
from .hyper import Hyperparameters
from .optim import Adam


@dataclass
class DemoRecord:
    obs: Observation
    action: JointAction
    rating: float | None = None
    winner: bool | None = None


@dataclass
class Dataset:
    records: list[DemoRecord] = field(default_factory=list)

    def validate(self) -> None:
        for i, rec in enumerate(self.records):
            if not pair_matrix(rec.obs)[rec.action.slot_a, rec.action.slot_b]:
                raise DataError(
                    f"record {i}: action ({rec.action.slot_a}, "
                    f"{rec.action.slot_b}) illegal in its observation")

    def __len__(self) -> int:
        return len(self.records)


def bc_loss(params: np.ndarray, records: list[DemoRecord],
            desc: ArchDescriptor) -> float:
    """Mean negative log-likelihood of the demonstrated joint actions."""
    return -float(np.mean(
        [log_prob(params, r.obs, r.action, desc) for r in records]))


def bc_train(dataset: Dataset, init_params: np.ndarray, desc: ArchDescriptor,
             hyper: Hyperparameters | None = None,
             learning_rate: float = 1e-2, epochs: int = 30,
             batch_size: int | None = None, seed: int = 0
             ) -> tuple[np.ndarray, list[float]]:
    """Minibatch Adam on the NLL.  Returns (params, per-epoch mean losses).

    ``hyper`` only contributes ``batch_size`` when given; the published
    learning rate targets long PPO runs and is far too small for cloning,
    so BC keeps its own default.
    """
    if not dataset.records:
        raise DataError("behavior-cloning dataset is empty")
    dataset.validate()
    if batch_size is None:
        batch_size = hyper.batch_size if hyper else 64
    params = np.array(init_params, dtype=float)
    opt = Adam(len(params), learning_rate)
    rng = np.random.default_rng(seed)
    losses = []
    n = len(dataset.records)
    for _ in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            recs = [dataset.records[i] for i in idx]
            batch = [(r.obs, r.action, -1.0 / len(recs)) for r in recs]
            grad = policy_grad(params, batch, desc)
            params = opt.step(params, grad)
            epoch_loss += bc_loss(params, recs, desc) * len(recs)
        losses.append(epoch_loss / n)
    return params, losses


def action_match_rate(params: np.ndarray, records: list[DemoRecord],
                      desc: ArchDescriptor) -> float:
    """Fraction of records where the policy argmax equals the demonstration."""
    from ..agents.network import joint_probabilities
    hits = 0
    for r in records:
        probs = joint_probabilities(params, r.obs, desc)
        a, b = np.unravel_index(int(np.argmax(probs)), probs.shape)
        hits += (int(a), int(b)) == (r.action.slot_a, r.action.slot_b)
    return hits / len(records)
