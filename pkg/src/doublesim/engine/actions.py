"""Per-slot action index space and its structured encoding.

The per-slot space has 107 regular indices plus two sentinels:

  -2  default        -1  forfeit        0  pass
  1..6               switch to team member 1..6
  7 + 20*b + 5*(m-1) + t
      m in 1..4      move slot
      t in 0..4      target: ally-a, ally-b, none, foe-a, foe-b
      b in 0..4      gimmick block: none, mega, z, dynamax, tera

The mega/z/dynamax blocks (27..86) exist in the index space but are never
legal in the mini rule set.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError

N_ACTIONS = 107
DEFAULT = -2
FORFEIT = -1
PASS = 0

TARGETS = ("ally-a", "ally-b", "none", "foe-a", "foe-b")
GIMMICKS = ("none", "mega", "z", "dynamax", "tera")

TARGET_NONE = 2


@dataclass(frozen=True)
class SlotAction:
    """Structured view of one per-slot action index."""

    kind: str  # "default" | "forfeit" | "pass" | "switch" | "move"
    switch_to: int = 0  # 1-based team member, switch only
    move_slot: int = 0  # 1-based, move only
    target: str = "none"
    gimmick: str = "none"


def decode_action(index: int) -> SlotAction:
    if index == DEFAULT:
        return SlotAction("default")
    if index == FORFEIT:
        return SlotAction("forfeit")
    if index == PASS:
        return SlotAction("pass")
    if 1 <= index <= 6:
        return SlotAction("switch", switch_to=index)
    if 7 <= index <= 106:
        offset = index - 7
        block, rest = divmod(offset, 20)
        move_slot, target = divmod(rest, 5)
        return SlotAction("move", move_slot=move_slot + 1,
                          target=TARGETS[target], gimmick=GIMMICKS[block])
    raise ValidationError(f"action index {index} out of range")


def encode_action(action: SlotAction) -> int:
    if action.kind == "default":
        return DEFAULT
    if action.kind == "forfeit":
        return FORFEIT
    if action.kind == "pass":
        return PASS
    if action.kind == "switch":
        if not 1 <= action.switch_to <= 6:
            raise ValidationError(f"switch target {action.switch_to} out of range")
        return action.switch_to
    if action.kind == "move":
        if not 1 <= action.move_slot <= 4:
            raise ValidationError(f"move slot {action.move_slot} out of range")
        return (7 + 20 * GIMMICKS.index(action.gimmick)
                + 5 * (action.move_slot - 1) + TARGETS.index(action.target))
    raise ValidationError(f"unknown action kind {action.kind!r}")


@dataclass(frozen=True)
class JointAction:
    """The two per-slot indices a player commits each turn."""

    slot_a: int
    slot_b: int

    def __iter__(self):
        return iter((self.slot_a, self.slot_b))
