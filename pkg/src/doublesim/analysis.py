"""Exact combinatorial size estimates for the game and benchmark comparisons.

All counts are exact big integers; (mantissa, exponent) forms are derived
from them only for display.  These numbers double as zero-tolerance
regression tests for the published magnitude estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# reference game-design inputs for the full-scale estimates
STAT_POINTS_NOTED = 512  # the prose figure; the arithmetic uses 510 (see report)
STAT_POINTS_USED = 510
STAT_UNIT_TOTAL = STAT_POINTS_USED // 4  # 127
STAT_UNIT_CAP = 252 // 4  # 63
STAT_PARTS = 6
EFFECTIVE_NATURES = 21  # 25 natures, but the 5 neutral ones are equivalent
LEARNSET_SIZE = 100
MOVES_PICKED = 4
ABILITIES_PER_MON = 3
ITEM_CHOICES = 223
GENDERS = 2
TERA_CHOICES = 19
ROSTER = 750
TEAM_SIZE = 6
BROUGHT = 4


@dataclass(frozen=True)
class Magnitude:
    """An exact count with a base-10 scientific view."""

    exact: int

    @property
    def mantissa(self) -> float:
        if self.exact == 0:
            return 0.0
        digits = str(self.exact)
        return float(digits[0] + "." + digits[1:17])

    @property
    def exponent(self) -> int:
        return len(str(self.exact)) - 1 if self.exact else 0

    def sci(self, sig: int = 4) -> str:
        return f"{round(self.mantissa, sig - 1):.{sig - 1}f}e{self.exponent}"

    def __mul__(self, other):
        o = other.exact if isinstance(other, Magnitude) else int(other)
        return Magnitude(self.exact * o)

    __rmul__ = __mul__


def bounded_compositions(total: int, parts: int, cap: int) -> int:
    """Compositions of ``total`` into ``parts`` ordered parts, each <= cap.

    Inclusion-exclusion over the parts that exceed the cap:
    sum_k (-1)^k C(parts, k) C(total - k(cap+1) + parts - 1, parts - 1).
    """
    if total < 0 or parts < 0 or cap < 0:
        raise ValueError("arguments must be non-negative")
    if parts == 0:
        return 1 if total == 0 else 0
    count = 0
    for k in range(parts + 1):
        rem = total - k * (cap + 1)
        if rem < 0:
            break
        count += (-1) ** k * math.comb(parts, k) * math.comb(rem + parts - 1,
                                                             parts - 1)
    return count


def stat_allocation_count() -> int:
    """Distinct stat spreads: 246,774,528 bounded compositions."""
    return bounded_compositions(STAT_UNIT_TOTAL, STAT_PARTS, STAT_UNIT_CAP)


def turn_outcome_counts(n_moves: int = 3, n_targets: int = 4,
                        n_switches: int = 2, tera: bool = True) -> int:
    """Per-slot distinct turn outcomes.

    A damaging move has 16 damage rolls x 5 (crit/miss/secondary branches)
    = 80 stochastic outcomes; the tera toggle doubles the move choices.
    """
    move_outcomes = 80
    factor = 2 if tera else 1
    return factor * move_outcomes * n_moves * n_targets + n_switches


def per_turn_branching() -> int:
    """Product over the four slots: two tera-capable, two not."""
    with_tera = turn_outcome_counts(tera=True)  # 1922
    without = turn_outcome_counts(tera=False)  # 962
    return with_tera ** 2 * without ** 2


def per_mon_hidden_configs() -> int:
    """Hidden per-mon configuration: natures x stat spreads."""
    return EFFECTIVE_NATURES * stat_allocation_count()


def info_set_size(unrevealed_bench: bool = False,
                  n_mons: int = TEAM_SIZE) -> Magnitude:
    """Opponent configurations indistinguishable to a player.

    Hidden stat configurations across the opposing team (all six members,
    matching the published derivation); when the two benched picks are also
    unknown, the C(4,2) = 6 bench splits multiply in.
    """
    count = per_mon_hidden_configs() ** n_mons
    if unrevealed_bench:
        count *= math.comb(BROUGHT, 2)
    return Magnitude(count)


def preview_decisions() -> int:
    """Ordered team-preview choices: C(6,2) lead pairs x C(4,2) bench."""
    return math.comb(6, 2) * math.comb(4, 2)


def config_space_per_mon() -> Magnitude:
    """Full-scale single-mon configuration count (approximately 5.166e20)."""
    return Magnitude(math.comb(LEARNSET_SIZE, MOVES_PICKED)
                     * ABILITIES_PER_MON * ITEM_CHOICES * GENDERS
                     * TERA_CHOICES * per_mon_hidden_configs())


def _round_sig(value: int, sig: int = 4) -> int:
    """Round a big integer to ``sig`` significant decimal digits."""
    m = Magnitude(value)
    mant = round(m.mantissa, sig - 1)
    return round(mant * 10 ** (sig - 1)) * 10 ** (m.exponent - sig + 1)


def config_space_team() -> Magnitude:
    """Full-scale team configuration count (approximately 4.604e138).

    Mirrors the published derivation, which rounds the hidden-config factor
    21 * 246,774,528 = 5,182,265,088 to 5.182e9 before multiplying; the team
    product inherits that rounding, landing at 4.6036e138 where the fully
    exact product gives 4.6053e138.
    """
    per_mon = (math.comb(LEARNSET_SIZE, MOVES_PICKED) * ABILITIES_PER_MON
               * ITEM_CHOICES * GENDERS * TERA_CHOICES
               * _round_sig(per_mon_hidden_configs()))
    return Magnitude(math.comb(ROSTER, TEAM_SIZE) * per_mon ** TEAM_SIZE)


def config_space_team_exact() -> Magnitude:
    """Same count without the intermediate rounding."""
    return Magnitude(math.comb(ROSTER, TEAM_SIZE)
                     * config_space_per_mon().exact ** TEAM_SIZE)


# --- benchmark comparison ----------------------------------------------------

def poker_10_deals() -> int:
    """Ten-player hold'em hole-card deals: prod C(52 - 2i, 2), i = 0..9."""
    total = 1
    for i in range(10):
        total *= math.comb(52 - 2 * i, 2)
    return total


def comparison_table() -> dict[str, Magnitude]:
    """Configuration-space sizes of benchmark games.

    The two Dota rows reflect two published formulas that disagree; both are
    reported unmodified.
    """
    return {
        "chess": Magnitude(2),
        "go": Magnitude(2),
        "poker-10": Magnitude(poker_10_deals()),
        "starcraft": Magnitude(9 * 3 ** 2),
        "dota-counted-once": Magnitude(math.comb(126, 5) * math.comb(121, 5)),
        "dota-counted-per-side": Magnitude(math.comb(252, 5) * math.comb(242, 5)),
        "vgc-doubles": config_space_team(),
    }


def full_report() -> str:
    """The complete derivation with intermediate values, for the CLI."""
    lines = []
    sa = stat_allocation_count()
    lines.append("stat allocations")
    lines.append(f"  budget: {STAT_POINTS_NOTED} points quoted, "
                 f"{STAT_POINTS_USED} spendable -> {STAT_UNIT_TOTAL} units of 4")
    lines.append(f"  bounded compositions({STAT_UNIT_TOTAL}, {STAT_PARTS}, "
                 f"{STAT_UNIT_CAP}) = {sa:,}")
    lines.append(f"  effective natures: {EFFECTIVE_NATURES}")
    lines.append("")
    lines.append("turn branching")
    t1922 = turn_outcome_counts(tera=True)
    t962 = turn_outcome_counts(tera=False)
    branch = Magnitude(per_turn_branching())
    lines.append(f"  per slot with tera: 2*80*3*4 + 2 = {t1922}")
    lines.append(f"  per slot without:     80*3*4 + 2 = {t962}")
    lines.append(f"  per turn: {t1922}^2 * {t962}^2 = {branch.sci()}")
    lines.append("")
    lines.append("information sets")
    rev = info_set_size(unrevealed_bench=False)
    unrev = info_set_size(unrevealed_bench=True)
    lines.append(f"  ({EFFECTIVE_NATURES} * {sa:,})^{TEAM_SIZE} = {rev.sci()}")
    lines.append(f"  x C(4,2) bench splits = {unrev.sci()}")
    lines.append("")
    lines.append("configuration space")
    pm = config_space_per_mon()
    team = config_space_team()
    lines.append(f"  per mon: C({LEARNSET_SIZE},{MOVES_PICKED}) * "
                 f"{ABILITIES_PER_MON} * {ITEM_CHOICES} * {GENDERS} * "
                 f"{TERA_CHOICES} * {EFFECTIVE_NATURES}*{sa:,} = {pm.sci()}")
    lines.append(f"  team: C({ROSTER},{TEAM_SIZE}) * per-mon^6 = {team.sci()}")
    lines.append(f"  team preview decisions: C(6,2)*C(4,2) = "
                 f"{preview_decisions()}")
    lines.append("")
    lines.append("benchmark comparison")
    for name, mag in comparison_table().items():
        lines.append(f"  {name:<22} {mag.sci(3)}")
    return "\n".join(lines)
