"""Meta-game numerics: cross-play estimation, zero-sum Nash, Alpha-Rank.

Win rates live in [0, 1]; the Nash solver consumes them mapped to zero-sum
payoffs 2p - 1, Alpha-Rank consumes win rates directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .agents.base import Policy
from .engine.config import GameOptions, TeamConfig
from .errors import ConfigurationError, SolverError, ValidationError
from .match import play_battle
from .teams import sample_matchup

Z_95 = 1.96


@dataclass
class PayoffMatrix:
    """Row-player win rates with per-entry game counts."""

    win_rates: np.ndarray  # (n, n)
    counts: np.ndarray  # (n, n) int
    policy_ids: list[str]
    seed: int = 0

    def validate(self) -> None:
        n = len(self.policy_ids)
        if self.win_rates.shape != (n, n) or self.counts.shape != (n, n):
            raise ValidationError("payoff matrix shape mismatch")
        played = self.counts > 0
        vals = self.win_rates[played]
        if len(vals) and (vals.min() < 0 or vals.max() > 1):
            raise ValidationError("win rates must lie in [0, 1]")

    def ci_halfwidths(self) -> np.ndarray:
        """Normal-approximation 95% CI halfwidth per entry."""
        p = self.win_rates
        n = np.maximum(self.counts, 1)
        return np.where(self.counts > 0, Z_95 * np.sqrt(p * (1 - p) / n), 0.0)


def ci_halfwidth(p_hat: float, n_games: int) -> float:
    return Z_95 * np.sqrt(p_hat * (1 - p_hat) / n_games)


@dataclass
class MetaStrategy:
    probs: np.ndarray
    provenance: str  # uniform | nash | alpharank-stationary
    value: float = 0.0

    def validate(self) -> None:
        if np.any(self.probs < -1e-12):
            raise ValidationError("meta-strategy has negative mass")
        if abs(self.probs.sum() - 1.0) > 1e-9:
            raise ValidationError("meta-strategy does not sum to 1")


@dataclass
class Ranking:
    entries: list[tuple[str, float]]  # (policy id, score), descending

    def __str__(self) -> str:
        lines = ["rank  policy            score"]
        for i, (pid, score) in enumerate(self.entries, 1):
            lines.append(f"{i:>4}  {pid:<16}  {score:.6f}")
        return "\n".join(lines)


# --- cross-play --------------------------------------------------------------

def crossplay_entry(p1: Policy, p2: Policy, teams: list[TeamConfig],
                    n_games: int, seed: int,
                    options: GameOptions | None = None) -> float:
    """Win rate of p1 over n_games with uniform team draws and fixed seeds."""
    rng = np.random.default_rng(seed)
    options = options or GameOptions()
    wins = 0
    for _ in range(n_games):
        t1, t2 = sample_matchup(teams, rng,
                                disable_mirror=options.disable_mirror_matches)
        result = play_battle((p1, p2), (t1, t2), int(rng.integers(2**31)),
                             options=options)
        wins += 1 - result.winner
    return wins / n_games


def estimate_crossplay(policies: list[Policy], teams: list[TeamConfig],
                       n_games: int, seed: int,
                       options: GameOptions | None = None,
                       policy_ids: list[str] | None = None) -> PayoffMatrix:
    """Pairwise win-rate matrix.

    Each unordered pair is played once with shared seeds and mirrored, so
    W(i, j) + W(j, i) = 1 exactly and the diagonal is fixed at 0.5.
    """
    if not policies:
        raise ConfigurationError("empty policy pool")
    if not teams:
        raise ConfigurationError("empty team set")
    if n_games < 1:
        raise ConfigurationError("n_games must be >= 1")
    n = len(policies)
    if policy_ids is None:
        policy_ids = [f"{getattr(p, 'name', 'policy')}-{i}"
                      for i, p in enumerate(policies)]
    win = np.full((n, n), 0.5)
    counts = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            pair_seed = int(np.random.default_rng((seed, i, j)).integers(2**31))
            w = crossplay_entry(policies[i], policies[j], teams, n_games,
                                pair_seed, options)
            win[i, j], win[j, i] = w, 1.0 - w
            counts[i, j] = counts[j, i] = n_games
    m = PayoffMatrix(win, counts, list(policy_ids), seed)
    m.validate()
    return m


# --- zero-sum Nash -----------------------------------------------------------

def solve_zero_sum_nash(payoffs: np.ndarray, tol: float = 1e-6
                        ) -> MetaStrategy:
    """Maximin strategy for the row player of a zero-sum payoff matrix.

    Standard LP: maximize v subject to x'A >= v per column, x a probability
    vector.  The returned strategy always satisfies the certificate
    min_j (x'A)_j >= value - tol.
    """
    a = np.asarray(payoffs, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("payoff matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValidationError("payoff matrix must be finite")
    n = a.shape[0]
    if n == 1:
        return MetaStrategy(np.ones(1), "nash", float(a[0, 0]))
    # variables: x_1..x_n, v; minimize -v
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-a.T, np.ones((n, 1))])  # v - (x'A)_j <= 0
    b_ub = np.zeros(n)
    a_eq = np.ones((1, n + 1))
    a_eq[0, -1] = 0.0
    bounds = [(0.0, None)] * n + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=bounds, method="highs")
    if not res.success:
        raise SolverError(f"Nash LP failed: {res.message}")
    x = np.clip(res.x[:n], 0.0, None)
    x /= x.sum()
    value = float(np.min(x @ a))
    gap = value - float(res.x[-1])
    strategy = MetaStrategy(x, "nash", value)
    strategy.validate()
    if np.min(x @ a) < value - tol:
        raise SolverError(f"Nash certificate violated (gap {gap:.3g})")
    return strategy


def nash_of_win_rates(win_rates: np.ndarray, tol: float = 1e-6) -> MetaStrategy:
    return solve_zero_sum_nash(2.0 * np.asarray(win_rates) - 1.0, tol)


def certificate_gap(payoffs: np.ndarray, strategy: MetaStrategy) -> float:
    """How far the strategy falls short of its claimed value (0 when exact)."""
    a = np.asarray(payoffs, dtype=float)
    return strategy.value - float(np.min(strategy.probs @ a))


# --- Alpha-Rank --------------------------------------------------------------

ALPHA_SWEEP = (0.1, 1.0, 10.0, 100.0)


def _fixation_probability(w_ji: float, alpha: float, m: int) -> float:
    """Probability a single j-mutant takes over an i-population.

    Logistic (Fermi) selection: the relative fitness difference between
    strategies j and i is f = w(j, i) - w(i, j).
    """
    f = w_ji - (1.0 - w_ji)
    x = alpha * f
    if abs(x) < 1e-12:
        return 1.0 / m
    if x < 0 and -x * m > 500:  # disfavored mutant: fixation underflows
        return float(np.exp(x * (m - 1)))
    # standard Moran-process closed form with exponential selection intensity
    num = -np.expm1(-x)
    den = -np.expm1(-x * m)
    return float(num / den)


def alpharank_transition_matrix(win_rates: np.ndarray, alpha: float,
                                m: int = 50, eps: float | None = None
                                ) -> np.ndarray:
    w = np.asarray(win_rates, dtype=float)
    n = w.shape[0]
    if eps is None:
        eps = 1.0 / (n * n)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            rho = _fixation_probability(w[j, i], alpha, m)
            # the mutation floor keeps the chain irreducible at large alpha
            t[i, j] = max(rho, eps) / (n - 1)
        t[i, i] = 1.0 - t[i].sum()
    return t


def stationary_distribution(t: np.ndarray, tol: float = 1e-12,
                            max_iter: int = 100_000) -> np.ndarray:
    """Left stationary vector by power iteration."""
    n = t.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ t
        if np.abs(nxt - pi).max() < tol:
            return nxt / nxt.sum()
        pi = nxt
    residual = float(np.abs(pi @ t - pi).max())
    if residual > 1e-9:
        raise SolverError(f"stationary iteration residual {residual:.3g}")
    return pi / pi.sum()


def alpha_rank(win_rates: np.ndarray, alpha: float = 10.0, m: int = 50,
               eps: float | None = None,
               policy_ids: list[str] | None = None
               ) -> tuple[MetaStrategy, Ranking]:
    w = np.asarray(win_rates, dtype=float)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ValidationError("win-rate matrix must be square")
    if alpha <= 0 or m < 2:
        raise ValidationError("need alpha > 0 and population size >= 2")
    if eps is not None and not 0 < eps < 1:
        raise ValidationError("mutation rate must lie in (0, 1)")
    t = alpharank_transition_matrix(w, alpha, m, eps)
    pi = stationary_distribution(t)
    strategy = MetaStrategy(pi, "alpharank-stationary")
    strategy.validate()
    if policy_ids is None:
        policy_ids = [f"policy-{i}" for i in range(n)]
    order = sorted(range(n), key=lambda i: (-pi[i], policy_ids[i]))
    ranking = Ranking([(policy_ids[i], float(pi[i])) for i in order])
    return strategy, ranking


def alpha_rank_sweep(win_rates: np.ndarray, m: int = 50,
                     policy_ids: list[str] | None = None
                     ) -> tuple[float, MetaStrategy, Ranking]:
    """Sweep the selection intensity; report the largest alpha that mixes."""
    best = None
    for alpha in ALPHA_SWEEP:
        try:
            strategy, ranking = alpha_rank(win_rates, alpha, m,
                                           policy_ids=policy_ids)
        except SolverError:
            continue
        best = (alpha, strategy, ranking)
    if best is None:
        raise SolverError("no alpha in the sweep produced a mixing chain")
    return best


# --- payoff matrix file I/O --------------------------------------------------

def save_payoff_matrix(m: PayoffMatrix, path: str | Path) -> None:
    lines = ["# payoff-matrix v1",
             f"# seed {m.seed}",
             "# ids " + " ".join(m.policy_ids)]
    for i in range(len(m.policy_ids)):
        lines.append(" ".join(f"{m.win_rates[i, j]:.6f}"
                              for j in range(len(m.policy_ids))))
    lines.append("# counts")
    for i in range(len(m.policy_ids)):
        lines.append(" ".join(str(int(m.counts[i, j]))
                              for j in range(len(m.policy_ids))))
    Path(path).write_text("\n".join(lines) + "\n")


def load_payoff_matrix(path: str | Path) -> PayoffMatrix:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "# payoff-matrix v1":
        raise ValidationError(f"{path}: not a payoff-matrix file")
    seed = int(lines[1].split()[2])
    ids = lines[2].split()[2:]
    n = len(ids)
    win = np.array([[float(v) for v in lines[3 + i].split()]
                    for i in range(n)])
    counts = np.array([[int(v) for v in lines[4 + n + i].split()]
                       for i in range(n)])
    m = PayoffMatrix(win, counts, ids, seed)
    m.validate()
    return m
