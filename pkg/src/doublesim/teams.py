"""Team sampling utilities and the bundled team sets.

The bundled sets live under ``doublesim/data/teams``: eight training teams
(``train_*``) and twenty-four held-out teams (``holdout_*``) whose ids are
disjoint from the training set, sized for the generalization protocol.
"""
from __future__ import annotations

from importlib import resources

import numpy as np

from .engine.config import PokemonConfig, StatAllocation, TeamConfig, team_from_yaml
from .gamedata import get_data


def random_stat_allocation(rng: np.random.Generator) -> StatAllocation:
    data = get_data()
    units = [0, 0, 0, 0, 0, 0]
    remaining = 127
    # two or three concentrated investments, like typical hand-built spreads
    for _ in range(int(rng.integers(2, 4))):
        i = int(rng.integers(6))
        amount = int(min(63 - units[i], remaining))
        units[i] += amount
        remaining -= amount
    nature = data.natures[int(rng.integers(len(data.natures)))].name
    return StatAllocation(units=tuple(units), nature=nature)


def random_team(rng: np.random.Generator, name: str = "") -> TeamConfig:
    data = get_data()
    picks = rng.choice(len(data.species), size=6, replace=False)
    mons = []
    for sid in picks:
        sp = data.species[int(sid)]
        moves = tuple(str(m) for m in rng.choice(sp.learnset, size=4, replace=False))
        mons.append(PokemonConfig(
            species=sp.name,
            moves=moves,
            ability=str(rng.choice(sp.abilities)),
            item=data.items[int(rng.integers(len(data.items)))] if rng.random() < 0.8 else None,
            tera_type=data.types[int(rng.integers(len(data.types)))],
            stats=random_stat_allocation(rng),
            gender="F" if rng.random() < 0.5 else "M",
        ))
    team = TeamConfig(members=tuple(mons), name=name)
    team.validate()
    return team


def _load_bundled(prefix: str) -> list[TeamConfig]:
    root = resources.files("doublesim.data").joinpath("teams")
    teams = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.startswith(prefix) and entry.name.endswith(".yaml"):
            teams.append(team_from_yaml(entry.read_text()))
    return teams


def builtin_train_teams() -> list[TeamConfig]:
    return _load_bundled("train_")


def builtin_holdout_teams() -> list[TeamConfig]:
    return _load_bundled("holdout_")


def sample_matchup(teams: list[TeamConfig], rng: np.random.Generator,
                   disable_mirror: bool = False) -> tuple[TeamConfig, TeamConfig]:
    """Uniform independent team draws, redrawing mirrors when disabled."""
    while True:
        c1 = teams[int(rng.integers(len(teams)))]
        c2 = teams[int(rng.integers(len(teams)))]
        if not disable_mirror or c1.id != c2.id or len(teams) == 1:
            return c1, c2
