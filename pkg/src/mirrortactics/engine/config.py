"""Game configuration: terrain, start positions, stat bounds, budgets.

Serialized as a JSON document so the CLI, the service, and recorded
demonstration files all agree on the exact rule set. Sub-hashes of the map
and the stat bounds are embedded in demo files and checkpoints so a model is
never silently trained or deployed on demos from a mismatched rule set.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    BOARD_HEIGHT,
    BOARD_WIDTH,
    NUM_TILES,
    TEAM_SIZE,
    ConfigError,
    MoveType,
    TileMap,
    Weapon,
    tile_col,
    tile_index,
    tile_row,
)

DEFAULT_TERRAIN = ["......"] * BOARD_HEIGHT
DEFAULT_BLUE_STARTS = (7, 8, 9, 10)  # row 1, cols 1..4
DEFAULT_STAT_BOUNDS = {
    "hp": (35, 50),
    "atk": (25, 40),
    "spd": (20, 40),
    "def": (15, 30),
    "res": (15, 30),
}
# Armor units trade resistance for raw power.
DEFAULT_ARMOR_ADJUST = {"atk": 5, "def": 5, "res": -5}
DEFAULT_MOVEMENT = {"infantry": 2, "cavalry": 3, "flying": 2, "armor": 1}
DEFAULT_BLUE_TEAM = (
    ("infantry", "sword"),
    ("armor", "lance"),
    ("cavalry", "axe"),
    ("flying", "bow"),
)


def row_flip_tile(tile: int) -> int:
    return tile_index(BOARD_HEIGHT - 1 - tile_row(tile), tile_col(tile))


def col_flip_tile(tile: int) -> int:
    return tile_index(tile_row(tile), BOARD_WIDTH - 1 - tile_col(tile))


@dataclass(frozen=True)
class GameConfig:
    tile_map: TileMap
    blue_starts: tuple[int, ...] = DEFAULT_BLUE_STARTS
    stat_bounds: dict = field(default_factory=lambda: dict(DEFAULT_STAT_BOUNDS))
    armor_adjust: dict = field(default_factory=lambda: dict(DEFAULT_ARMOR_ADJUST))
    movement: dict = field(default_factory=lambda: dict(DEFAULT_MOVEMENT))
    max_learner_actions: int = 20
    blue_team: tuple[tuple[str, str], ...] = DEFAULT_BLUE_TEAM
    standard_ai_movement: str = "approach"

    def __post_init__(self) -> None:
        if len(self.blue_starts) != TEAM_SIZE:
            raise ConfigError("need exactly 4 blue start positions")
        if len(set(self.blue_starts)) != TEAM_SIZE:
            raise ConfigError("blue start positions overlap")
        for t in self.blue_starts:
            if not 0 <= t < NUM_TILES:
                raise ConfigError(f"start tile {t} off the board")
        reds = set(self.red_starts)
        if reds & set(self.blue_starts):
            raise ConfigError("mirrored red starts overlap blue starts")
        for key, (lo, hi) in self.stat_bounds.items():
            if lo > hi or lo < 0:
                raise ConfigError(f"bad stat bound for {key}: [{lo}, {hi}]")
        if set(self.movement) != {m.value for m in MoveType}:
            raise ConfigError("movement budgets must cover all four move types")
        if any(b < 1 for b in self.movement.values()):
            raise ConfigError("movement budgets must be >= 1")
        if self.max_learner_actions < 1:
            raise ConfigError("max_learner_actions must be >= 1")
        if len(self.blue_team) != TEAM_SIZE:
            raise ConfigError("blue_team must define 4 units")
        for move_type, weapon in self.blue_team:
            MoveType(move_type)
            Weapon(weapon)
        if self.standard_ai_movement not in ("approach", "hold"):
            raise ConfigError(f"unknown standard_ai movement {self.standard_ai_movement!r}")

    @property
    def red_starts(self) -> tuple[int, ...]:
        """Red starts mirror blue's across the horizontal center, per slot."""
        return tuple(row_flip_tile(t) for t in self.blue_starts)

    def movement_budget(self, move_type: MoveType) -> int:
        return int(self.movement[move_type.value])

    def to_json(self) -> dict:
        return {
            "terrain": self.tile_map.to_rows(),
            "blue_starts": list(self.blue_starts),
            "stat_bounds": {k: list(v) for k, v in self.stat_bounds.items()},
            "armor_adjust": dict(self.armor_adjust),
            "movement": dict(self.movement),
            "max_learner_actions": self.max_learner_actions,
            "blue_team": [list(u) for u in self.blue_team],
            "standard_ai": {"movement": self.standard_ai_movement},
        }

    @staticmethod
    def from_json(obj: dict) -> "GameConfig":
        try:
            return GameConfig(
                tile_map=TileMap.from_rows(list(obj["terrain"])),
                blue_starts=tuple(int(t) for t in obj["blue_starts"]),
                stat_bounds={k: (int(v[0]), int(v[1])) for k, v in obj["stat_bounds"].items()},
                armor_adjust={k: int(v) for k, v in obj["armor_adjust"].items()},
                movement={k: int(v) for k, v in obj["movement"].items()},
                max_learner_actions=int(obj.get("max_learner_actions", 20)),
                blue_team=tuple((str(m), str(w)) for m, w in obj["blue_team"]),
                standard_ai_movement=str(obj.get("standard_ai", {}).get("movement", "approach")),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed game config: {exc}") from exc

    @staticmethod
    def load(path: str | Path) -> "GameConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read game config {path}: {exc}") from exc
        return GameConfig.from_json(obj)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    # -- hashes ------------------------------------------------------------

    def _digest(self, obj) -> str:
        blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def map_hash(self) -> str:
        return self._digest(
            {
                "terrain": self.tile_map.to_rows(),
                "blue_starts": list(self.blue_starts),
                "movement": dict(self.movement),
                "max_learner_actions": self.max_learner_actions,
            }
        )

    def stat_hash(self) -> str:
        return self._digest(
            {
                "stat_bounds": {k: list(v) for k, v in self.stat_bounds.items()},
                "armor_adjust": dict(self.armor_adjust),
            }
        )

    def config_hash(self) -> str:
        return self._digest(self.to_json())


def default_config() -> GameConfig:
    return GameConfig(tile_map=TileMap.from_rows(DEFAULT_TERRAIN))
