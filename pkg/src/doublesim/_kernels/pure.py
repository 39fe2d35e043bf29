"""Pure-Python implementations of the battle engine's numeric kernels.

The compiled extension (``doublesim._kernels._core``) implements the same
functions with identical semantics; either backend may be active at runtime.
Keep the two files in lockstep -- ``tests/test_kernels.py`` checks parity.
"""
from __future__ import annotations

import math

BACKEND = "python"

ROLL_COUNT = 16


def compute_stat(base: int, iv: int, units: int, level: int,
                 nature_mult: float, is_hp: bool) -> int:
    core = (2 * base + iv + units) * level // 100
    if is_hp:
        return core + level + 10
    return math.floor(nature_mult * (core + 5))


def damage_amount(power: int, attack: int, defense: int, level: int,
                  stab: float, effectiveness: float, crit: bool,
                  roll_index: int, spread: bool, weather_mult: float,
                  screen_mult: float, item_mult: float,
                  ability_mult: float, burned: bool) -> int:
    """Damage dealt by one hit.  Multipliers apply in a fixed order with a
    floor after each step; a hit that is not immune deals at least 1."""
    if power <= 0 or effectiveness == 0.0:
        return 0
    dmg = (2 * level // 5 + 2) * power * attack // defense // 50 + 2
    if spread:
        dmg = math.floor(dmg * 0.75)
    if weather_mult != 1.0:
        dmg = math.floor(dmg * weather_mult)
    if crit:
        dmg = math.floor(dmg * 1.5)
    dmg = math.floor(dmg * (0.85 + 0.01 * roll_index))
    if stab != 1.0:
        dmg = math.floor(dmg * stab)
    dmg = math.floor(dmg * effectiveness)
    if burned:
        dmg = math.floor(dmg * 0.5)
    if screen_mult != 1.0:
        dmg = math.floor(dmg * screen_mult)
    if item_mult != 1.0:
        dmg = math.floor(dmg * item_mult)
    if ability_mult != 1.0:
        dmg = math.floor(dmg * ability_mult)
    return max(dmg, 1)


def boost_multiplier(stage: int) -> float:
    if stage >= 0:
        return (2 + stage) / 2.0
    return 2.0 / (2 - stage)
