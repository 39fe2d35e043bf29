"""Numeric kernel selection: compiled extension when available, else pure Python.

``doublesim._kernels.BACKEND`` reports which implementation is active.
Set ``DOUBLESIM_PURE_KERNELS=1`` to force the pure-Python backend.
"""
import os

if os.environ.get("DOUBLESIM_PURE_KERNELS"):
    from .pure import BACKEND, ROLL_COUNT, boost_multiplier, compute_stat, damage_amount
else:
    try:
        from ._core import (  # type: ignore[attr-defined]
            BACKEND, ROLL_COUNT, boost_multiplier, compute_stat, damage_amount)
    except ImportError:
        from .pure import (
            BACKEND, ROLL_COUNT, boost_multiplier, compute_stat, damage_amount)

__all__ = ["BACKEND", "ROLL_COUNT", "boost_multiplier", "compute_stat", "damage_amount"]
