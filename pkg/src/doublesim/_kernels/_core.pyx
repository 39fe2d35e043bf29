# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled twin of doublesim._kernels.pure -- keep semantics identical."""

from libc.math cimport floor

BACKEND = "cython"

ROLL_COUNT = 16


cpdef long compute_stat(long base, long iv, long units, long level,
                        double nature_mult, bint is_hp):
    cdef long core = (2 * base + iv + units) * level // 100
    if is_hp:
        return core + level + 10
    return <long>floor(nature_mult * (core + 5))


cpdef long damage_amount(long power, long attack, long defense, long level,
                         double stab, double effectiveness, bint crit,
                         long roll_index, bint spread, double weather_mult,
                         double screen_mult, double item_mult,
                         double ability_mult, bint burned):
    if power <= 0 or effectiveness == 0.0:
        return 0
    cdef long dmg = (2 * level // 5 + 2) * power * attack // defense // 50 + 2
    if spread:
        dmg = <long>floor(dmg * 0.75)
    if weather_mult != 1.0:
        dmg = <long>floor(dmg * weather_mult)
    if crit:
        dmg = <long>floor(dmg * 1.5)
    dmg = <long>floor(dmg * (0.85 + 0.01 * roll_index))
    if stab != 1.0:
        dmg = <long>floor(dmg * stab)
    dmg = <long>floor(dmg * effectiveness)
    if burned:
        dmg = <long>floor(dmg * 0.5)
    if screen_mult != 1.0:
        dmg = <long>floor(dmg * screen_mult)
    if item_mult != 1.0:
        dmg = <long>floor(dmg * item_mult)
    if ability_mult != 1.0:
        dmg = <long>floor(dmg * ability_mult)
    return dmg if dmg > 1 else 1


cpdef double boost_multiplier(long stage):
    if stage >= 0:
        return (2 + stage) / 2.0
    return 2.0 / (2 - stage)
