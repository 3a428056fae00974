"""Deterministic rules engine for the 6x8 grid tactics game."""

from .board import NEIGHBORS, attackable_targets, launch_tiles_for, occupancy, reachable_tiles
from .config import GameConfig, col_flip_tile, default_config, row_flip_tile
from .game import (
    advance_phase,
    apply_action,
    combat_forecast,
    legal_action,
    mirror_team,
    new_game,
    outcome,
    phase_complete,
    roll_spec,
)
from .model import (
    ACTION_ATTACK,
    ACTION_MOVE,
    ACTION_WAIT,
    BOARD_HEIGHT,
    BOARD_WIDTH,
    MELEE_WEAPONS,
    MOVE_TYPES,
    NUM_TILES,
    TEAM_SIZE,
    WEAPONS,
    ActionTriple,
    AttackEvent,
    CombatForecast,
    ConfigError,
    EngineError,
    Event,
    GameOverEvent,
    GameState,
    IllegalAction,
    IllegalQuery,
    KillEvent,
    MoveEvent,
    MoveType,
    Outcome,
    PhaseError,
    PhaseEvent,
    StrikeEvent,
    Team,
    Terrain,
    TileMap,
    UnitSpec,
    UnitState,
    WaitEvent,
    Weapon,
    manhattan,
    tile_col,
    tile_index,
    tile_row,
)
from .rules import (
    EFFECTIVENESS_BONUS,
    FOLLOWUP_SPEED_GAP,
    TRIANGLE_ADVANTAGE,
    TRIANGLE_DISADVANTAGE,
    effectiveness_multiplier,
    per_hit_damage,
    terrain_cost,
    triangle_multiplier,
)

__all__ = [
    "ACTION_ATTACK",
    "ACTION_MOVE",
    "ACTION_WAIT",
    "BOARD_HEIGHT",
    "BOARD_WIDTH",
    "EFFECTIVENESS_BONUS",
    "FOLLOWUP_SPEED_GAP",
    "MELEE_WEAPONS",
    "MOVE_TYPES",
    "NEIGHBORS",
    "NUM_TILES",
    "TEAM_SIZE",
    "WEAPONS",
    "TRIANGLE_ADVANTAGE",
    "TRIANGLE_DISADVANTAGE",
    "ActionTriple",
    "AttackEvent",
    "CombatForecast",
    "ConfigError",
    "EngineError",
    "Event",
    "GameConfig",
    "GameOverEvent",
    "GameState",
    "IllegalAction",
    "IllegalQuery",
    "KillEvent",
    "MoveEvent",
    "MoveType",
    "Outcome",
    "PhaseError",
    "PhaseEvent",
    "StrikeEvent",
    "Team",
    "Terrain",
    "TileMap",
    "UnitSpec",
    "UnitState",
    "WaitEvent",
    "Weapon",
    "advance_phase",
    "apply_action",
    "attackable_targets",
    "col_flip_tile",
    "combat_forecast",
    "default_config",
    "effectiveness_multiplier",
    "launch_tiles_for",
    "legal_action",
    "manhattan",
    "mirror_team",
    "new_game",
    "occupancy",
    "outcome",
    "per_hit_damage",
    "phase_complete",
    "reachable_tiles",
    "roll_spec",
    "row_flip_tile",
    "terrain_cost",
    "tile_col",
    "tile_index",
    "tile_row",
    "triangle_multiplier",
]
