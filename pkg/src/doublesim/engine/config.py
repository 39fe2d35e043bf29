"""Team and battler configuration types, stat computation, and team files.

A team file is a human-readable YAML document with a canonical field order;
``TeamConfig.id`` is the content hash of that canonical serialization, so two
files describing the same team always share an id regardless of formatting.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import yaml

from ..errors import ValidationError
from ..gamedata import STAT_KEYS, get_data
from .. import _kernels

EV_UNIT_CAP = 63
EV_TOTAL_CAP = 127
LEVEL = 50
IV = 31


@dataclass(frozen=True)
class StatAllocation:
    """EV-style unit spread (1 unit = 4 effort points) plus a nature."""

    units: tuple[int, int, int, int, int, int] = (0, 0, 0, 0, 0, 0)
    nature: str = "Hardy"

    def validate(self) -> None:
        data = get_data()
        if len(self.units) != 6:
            raise ValidationError(f"expected 6 unit values, got {len(self.units)}")
        for u in self.units:
            if not 0 <= u <= EV_UNIT_CAP:
                raise ValidationError(f"unit value {u} outside [0, {EV_UNIT_CAP}]")
        if sum(self.units) > EV_TOTAL_CAP:
            raise ValidationError(f"unit sum {sum(self.units)} exceeds {EV_TOTAL_CAP}")
        if self.nature not in data.nature_index:
            raise ValidationError(f"unknown nature {self.nature!r}")


@dataclass(frozen=True)
class PokemonConfig:
    species: str
    moves: tuple[str, ...]
    ability: str
    item: str | None = None
    tera_type: str = "Normal"
    stats: StatAllocation = field(default_factory=StatAllocation)
    gender: str = "F"

    def validate(self) -> None:
        data = get_data()
        if self.species not in data.species_index:
            raise ValidationError(f"unknown species {self.species!r}")
        spec = data.species[data.species_index[self.species]]
        if not 1 <= len(self.moves) <= 4:
            raise ValidationError(f"{self.species}: needs 1-4 moves, got {len(self.moves)}")
        if len(set(self.moves)) != len(self.moves):
            raise ValidationError(f"{self.species}: duplicate moves")
        for m in self.moves:
            if m not in spec.learnset:
                raise ValidationError(f"{self.species}: {m!r} not in learnset")
        if self.ability not in spec.abilities:
            raise ValidationError(f"{self.species}: ability {self.ability!r} not available")
        if self.item is not None and self.item not in data.item_index:
            raise ValidationError(f"unknown item {self.item!r}")
        if self.tera_type not in data.type_index:
            raise ValidationError(f"unknown tera type {self.tera_type!r}")
        if self.gender not in ("F", "M"):
            raise ValidationError(f"gender must be 'F' or 'M', got {self.gender!r}")
        self.stats.validate()


def compute_stats(cfg: PokemonConfig) -> dict[str, int]:
    """Final stat block at level 50 with maxed IVs.

    HP:    floor((2*base + IV + units) * L/100) + L + 10
    Other: floor(nature * (floor((2*base + IV + units) * L/100) + 5))
    """
    cfg.validate()
    data = get_data()
    spec = data.species[data.species_index[cfg.species]]
    nature = data.natures[data.nature_index[cfg.stats.nature]]
    out = {}
    for i, key in enumerate(STAT_KEYS):
        base = spec.base_stats[key]
        units = cfg.stats.units[i]
        out[key] = _kernels.compute_stat(
            base, IV, units, LEVEL, nature.multiplier(key), key == "hp")
    return out


@dataclass(frozen=True)
class TeamConfig:
    members: tuple[PokemonConfig, ...]
    name: str = ""

    def validate(self) -> None:
        if len(self.members) != 6:
            raise ValidationError(f"team needs exactly 6 members, got {len(self.members)}")
        for m in self.members:
            m.validate()

    @property
    def id(self) -> str:
        return hashlib.sha256(canonical_team_yaml(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class GameOptions:
    skip_team_preview: bool = False
    disable_mirror_matches: bool = False
    open_team_sheets: bool = True
    turn_cap: int = 300
    n_frames: int = 1

    def validate(self) -> None:
        if self.turn_cap < 1:
            raise ValidationError("turn_cap must be >= 1")
        if self.n_frames < 1:
            raise ValidationError("n_frames must be >= 1")


# --- team files -------------------------------------------------------------

_MON_FIELDS = ("species", "moves", "ability", "item", "tera_type", "units",
               "nature", "gender")


def _mon_to_doc(mon: PokemonConfig) -> dict:
    return {
        "species": mon.species,
        "moves": list(mon.moves),
        "ability": mon.ability,
        "item": mon.item,
        "tera_type": mon.tera_type,
        "units": list(mon.stats.units),
        "nature": mon.stats.nature,
        "gender": mon.gender,
    }


def canonical_team_yaml(team: TeamConfig) -> str:
    """Canonical serialization: fixed field order, block style, no name.

    The team name is presentation-only and excluded from the hash.
    """
    doc = {"pokemon": [_mon_to_doc(m) for m in team.members]}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def team_to_yaml(team: TeamConfig) -> str:
    doc = {"name": team.name, "pokemon": [_mon_to_doc(m) for m in team.members]}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def team_from_yaml(text: str) -> TeamConfig:
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict) or "pokemon" not in doc:
        raise ValidationError("team file must contain a 'pokemon' list")
    mons = []
    for entry in doc["pokemon"]:
        unknown = set(entry) - set(_MON_FIELDS)
        if unknown:
            raise ValidationError(f"unknown team-file fields: {sorted(unknown)}")
        mons.append(PokemonConfig(
            species=entry["species"],
            moves=tuple(entry["moves"]),
            ability=entry["ability"],
            item=entry.get("item"),
            tera_type=entry.get("tera_type", "Normal"),
            stats=StatAllocation(
                units=tuple(entry.get("units", (0,) * 6)),
                nature=entry.get("nature", "Hardy"),
            ),
            gender=entry.get("gender", "F"),
        ))
    team = TeamConfig(members=tuple(mons), name=doc.get("name", ""))
    team.validate()
    return team


def load_team(path) -> TeamConfig:
    with open(path) as f:
        return team_from_yaml(f.read())


def save_team(team: TeamConfig, path) -> None:
    with open(path, "w") as f:
        f.write(team_to_yaml(team))
