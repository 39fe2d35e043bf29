"""Training hyperparameters and their published defaults."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigurationError


@dataclass
class Hyperparameters:
    learning_rate: float = 1e-5
    gamma: float = 1.0
    gae_lambda: float = 0.95
    clip_range: float = 0.2
    entropy_coef: float = 0.001
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    steps_per_update: int = 24 * 128
    batch_size: int = 64
    n_epochs: int = 10
    total_timesteps: int = 200_000

    def validate(self) -> None:
        positives = ("learning_rate", "clip_range", "value_coef",
                     "max_grad_norm", "steps_per_update", "batch_size",
                     "n_epochs", "total_timesteps")
        for f in positives:
            if getattr(self, f) <= 0:
                raise ConfigurationError(f"{f} must be positive")
        for f in ("gamma", "gae_lambda"):
            if not 0.0 <= getattr(self, f) <= 1.0:
                raise ConfigurationError(f"{f} must lie in [0, 1]")
        if self.entropy_coef < 0:
            raise ConfigurationError("entropy_coef must be non-negative")


def desk_profile() -> Hyperparameters:
    """Aggressive small-scale settings for CPU smoke runs.

    The published learning rate (1e-5) is tuned for multi-million-step runs;
    at the 10^4-10^5 step budgets used in tests it barely moves the policy,
    so the smoke profile raises it and shrinks the collection period.
    """
    return Hyperparameters(learning_rate=3e-4, steps_per_update=512,
                           batch_size=128, n_epochs=4,
                           total_timesteps=20_000)
