"""Loader for the bundled roster, move, type-chart, nature, ability and item data.

All tables are versioned JSON files shipped inside the package.  A single
``GameData`` instance is shared process-wide (the tables are immutable), and
its content hash is stamped into battle logs and checkpoints so artifacts
produced by different data versions cannot be silently mixed.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

STAT_KEYS = ("hp", "atk", "def", "spa", "spd", "spe")

# mini rule set statuses (order fixed: used by observation one-hots)
STATUSES = ("par", "brn", "psn")

WEATHERS = ("rain", "sun")
TERRAINS = ("grassy",)
SIDE_CONDITIONS = ("tailwind", "barrier")


@dataclass(frozen=True)
class Move:
    id: int
    name: str
    type: str
    category: str  # physical | special | status
    power: int
    accuracy: int  # percent
    priority: int
    target: str  # single | spread-foes | spread-all | self | side | field
    effect: dict


@dataclass(frozen=True)
class Species:
    id: int
    name: str
    types: tuple[str, ...]
    base_stats: dict[str, int]
    abilities: tuple[str, ...]
    learnset: tuple[str, ...]


@dataclass(frozen=True)
class Nature:
    id: int
    name: str
    plus: str | None
    minus: str | None

    def multiplier(self, stat: str) -> float:
        if stat == self.plus:
            return 1.1
        if stat == self.minus:
            return 0.9
        return 1.0


class GameData:
    """Immutable view over the bundled data files."""

    def __init__(self) -> None:
        raw = {}
        for fname in ("typechart", "natures", "moves", "abilities", "items", "species"):
            text = resources.files("doublesim.data").joinpath(f"{fname}.json").read_text()
            raw[fname] = text
        digest = hashlib.sha256()
        for fname in sorted(raw):
            digest.update(raw[fname].encode())
        self.content_hash = digest.hexdigest()[:16]

        chart_doc = json.loads(raw["typechart"])
        self.types: list[str] = chart_doc["types"]
        self.type_index = {t: i for i, t in enumerate(self.types)}
        self.chart: dict[str, dict[str, float]] = chart_doc["chart"]

        self.natures = [
            Nature(i, n["name"], n["plus"], n["minus"])
            for i, n in enumerate(json.loads(raw["natures"])["natures"])
        ]
        self.nature_index = {n.name: n.id for n in self.natures}

        self.moves = [
            Move(i, m["name"], m["type"], m["category"], m["power"],
                 m["accuracy"], m["priority"], m["target"], m["effect"])
            for i, m in enumerate(json.loads(raw["moves"])["moves"])
        ]
        self.move_index = {m.name: m.id for m in self.moves}

        self.abilities = [a["name"] for a in json.loads(raw["abilities"])["abilities"]]
        self.ability_index = {a: i for i, a in enumerate(self.abilities)}

        self.items = [i["name"] for i in json.loads(raw["items"])["items"]]
        self.item_index = {i: j for j, i in enumerate(self.items)}

        self.species = [
            Species(i, s["name"], tuple(s["types"]), s["base_stats"],
                    tuple(s["abilities"]), tuple(s["learnset"]))
            for i, s in enumerate(json.loads(raw["species"])["species"])
        ]
        self.species_index = {s.name: s.id for s in self.species}

    def effectiveness(self, move_type: str, defender_types: tuple[str, ...]) -> float:
        mult = 1.0
        for t in defender_types:
            mult *= self.chart[move_type][t]
        return mult


@lru_cache(maxsize=1)
def get_data() -> GameData:
    return GameData()
