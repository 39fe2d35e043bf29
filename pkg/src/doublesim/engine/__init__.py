"""Deterministic doubles-battle game engine."""
from .actions import (
    DEFAULT, FORFEIT, N_ACTIONS, PASS, JointAction, SlotAction,
    decode_action, encode_action)
from .battle import joint_legal, legal_slot_actions, step
from .config import (
    GameOptions, PokemonConfig, StatAllocation, TeamConfig, compute_stats,
    load_team, save_team, team_from_yaml, team_to_yaml)
from .obs import Observation, encode_frame, encode_observation, frame_width
from .state import (
    PHASE_PREVIEW1, PHASE_PREVIEW2, PHASE_TERMINAL, PHASE_TURN,
    BattleState, start_battle)

__all__ = [
    "DEFAULT", "FORFEIT", "N_ACTIONS", "PASS",
    "JointAction", "SlotAction", "decode_action", "encode_action",
    "joint_legal", "legal_slot_actions", "step",
    "GameOptions", "PokemonConfig", "StatAllocation", "TeamConfig",
    "compute_stats", "load_team", "save_team", "team_from_yaml", "team_to_yaml",
    "Observation", "encode_frame", "encode_observation", "frame_width",
    "PHASE_PREVIEW1", "PHASE_PREVIEW2", "PHASE_TERMINAL", "PHASE_TURN",
    "BattleState", "start_battle",
]
