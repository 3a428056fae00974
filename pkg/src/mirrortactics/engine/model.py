"""Core domain types for the tactics engine.

The board is a fixed 6-column by 8-row grid. Tiles are indexed
``tile = row * 6 + col`` with ``row in 0..7`` and ``col in 0..5``; this
encoding is shared by the action space, the observation encoder, and every
file format in the project.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

BOARD_WIDTH = 6
BOARD_HEIGHT = 8
NUM_TILES = BOARD_WIDTH * BOARD_HEIGHT
TEAM_SIZE = 4

# Action-type branch indices.
ACTION_WAIT = 0
ACTION_MOVE = 1
ACTION_ATTACK = 2


def tile_row(tile: int) -> int:
    return tile // BOARD_WIDTH


def tile_col(tile: int) -> int:
    return tile % BOARD_WIDTH


def tile_index(row: int, col: int) -> int:
    return row * BOARD_WIDTH + col


def manhattan(a: int, b: int) -> int:
    return abs(a // BOARD_WIDTH - b // BOARD_WIDTH) + abs(a % BOARD_WIDTH - b % BOARD_WIDTH)


class Team(str, Enum):
    BLUE = "blue"
    RED = "red"

    @property
    def opponent(self) -> "Team":
        return Team.RED if self is Team.BLUE else Team.BLUE


class MoveType(str, Enum):
    INFANTRY = "infantry"
    CAVALRY = "cavalry"
    FLYING = "flying"
    ARMOR = "armor"


class Weapon(str, Enum):
    SWORD = "sword"
    LANCE = "lance"
    AXE = "axe"
    BOW = "bow"
    MAGIC = "magic"


class Terrain(str, Enum):
    PLAIN = "plain"
    FOREST = "forest"
    MOUNTAIN = "mountain"


MOVE_TYPES = tuple(MoveType)
WEAPONS = tuple(Weapon)
MELEE_WEAPONS = (Weapon.SWORD, Weapon.LANCE, Weapon.AXE)

TERRAIN_CHARS = {".": Terrain.PLAIN, "f": Terrain.FOREST, "m": Terrain.MOUNTAIN}
TERRAIN_TO_CHAR = {v: k for k, v in TERRAIN_CHARS.items()}


class Outcome(str, Enum):
    ONGOING = "ongoing"
    BLUE_WIN = "blue_win"
    RED_WIN = "red_win"
    TIE = "tie"


class EngineError(Exception):
    """Base class for engine failures."""


class ConfigError(EngineError):
    """Invalid game configuration."""


class IllegalQuery(EngineError):
    """Query on a unit that cannot act (dead or already acted)."""


class PhaseError(EngineError):
    """Phase advanced while units of the active team still have turns."""


class IllegalAction(EngineError):
    """Rejected action. ``reason`` is a stable machine-readable code."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class TileMap:
    """Terrain layout. Must be symmetric under row-flip and column-flip."""

    terrain: tuple[Terrain, ...]

    def __post_init__(self) -> None:
        if len(self.terrain) != NUM_TILES:
            raise ConfigError(f"terrain must cover {NUM_TILES} tiles, got {len(self.terrain)}")
        for t in range(NUM_TILES):
            r, c = tile_row(t), tile_col(t)
            flipped_rows = tile_index(BOARD_HEIGHT - 1 - r, c)
            flipped_cols = tile_index(r, BOARD_WIDTH - 1 - c)
            if self.terrain[t] != self.terrain[flipped_rows] or self.terrain[t] != self.terrain[flipped_cols]:
                raise ConfigError(f"terrain not symmetric at tile {t}")

    @staticmethod
    def from_rows(rows: list[str]) -> "TileMap":
        if len(rows) != BOARD_HEIGHT or any(len(r) != BOARD_WIDTH for r in rows):
            raise ConfigError("terrain grid must be 8 rows x 6 chars")
        cells = []
        for row in rows:
            for ch in row:
                if ch not in TERRAIN_CHARS:
                    raise ConfigError(f"unknown terrain char {ch!r}")
                cells.append(TERRAIN_CHARS[ch])
        return TileMap(tuple(cells))

    def to_rows(self) -> list[str]:
        return [
            "".join(TERRAIN_TO_CHAR[self.terrain[tile_index(r, c)]] for c in range(BOARD_WIDTH))
            for r in range(BOARD_HEIGHT)
        ]


@dataclass(frozen=True)
class UnitSpec:
    """Immutable unit identity: movement class, weapon, and base stats."""

    move_type: MoveType
    weapon: Weapon
    hp: int
    atk: int
    defense: int
    res: int
    spd: int

    def __post_init__(self) -> None:
        if self.hp < 1:
            raise ConfigError("unit hp must be >= 1")
        for name in ("atk", "defense", "res", "spd"):
            if getattr(self, name) < 0:
                raise ConfigError(f"unit {name} must be non-negative")

    @property
    def attack_range(self) -> int:
        return 1 if self.weapon in MELEE_WEAPONS else 2

    @property
    def is_melee(self) -> bool:
        return self.weapon in MELEE_WEAPONS

    def to_json(self) -> dict:
        return {
            "move_type": self.move_type.value,
            "weapon": self.weapon.value,
            "hp": self.hp,
            "atk": self.atk,
            "def": self.defense,
            "res": self.res,
            "spd": self.spd,
        }

    @staticmethod
    def from_json(obj: dict) -> "UnitSpec":
        return UnitSpec(
            move_type=MoveType(obj["move_type"]),
            weapon=Weapon(obj["weapon"]),
            hp=int(obj["hp"]),
            atk=int(obj["atk"]),
            defense=int(obj["def"]),
            res=int(obj["res"]),
            spd=int(obj["spd"]),
        )


@dataclass(frozen=True)
class UnitState:
    """A unit on the board. ``position`` is -1 once the unit is dead."""

    spec: UnitSpec
    slot: int
    team: Team
    position: int
    current_hp: int
    acted: bool = False

    @property
    def alive(self) -> bool:
        return self.current_hp > 0

    def damaged(self, amount: int) -> "UnitState":
        hp = max(0, self.current_hp - amount)
        return replace(self, current_hp=hp, position=self.position if hp > 0 else -1)


@dataclass(frozen=True)
class ActionTriple:
    """Three-branch discrete action: type, tile, target.

    ``target`` indexes the opposing team's slots and is only meaningful for
    attacks; it is carried (and recorded) for the other action types because
    the policy emits all three branches every step.
    """

    action_type: int
    tile: int
    target: int = 0

    def __post_init__(self) -> None:
        if self.action_type not in (ACTION_WAIT, ACTION_MOVE, ACTION_ATTACK):
            raise IllegalAction("bad_action_type", str(self.action_type))
        if not 0 <= self.tile < NUM_TILES:
            raise IllegalAction("bad_tile", str(self.tile))
        if not 0 <= self.target < TEAM_SIZE:
            raise IllegalAction("bad_target", str(self.target))

    def to_json(self) -> dict:
        return {"action_type": self.action_type, "tile": self.tile, "target": self.target}

    @staticmethod
    def from_json(obj: dict) -> "ActionTriple":
        return ActionTriple(int(obj["action_type"]), int(obj["tile"]), int(obj["target"]))


@dataclass(frozen=True)
class CombatForecast:
    """Projected outcome of one attack action, before it is executed."""

    per_hit_damage_attacker: int
    per_hit_damage_defender: int
    attacker_followup: bool
    defender_followup: bool
    defender_can_counter: bool
    projected_attacker_hp: int
    projected_defender_hp: int


@dataclass(frozen=True)
class GameState:
    """Full game snapshot. All mutation goes through functional updates."""

    tile_map: TileMap
    units: tuple[UnitState, ...]
    phase: Team
    learner_action_count: int
    rng_seed: int
    outcome: Outcome = Outcome.ONGOING

    def unit(self, team: Team, slot: int) -> UnitState:
        return self.units[(0 if team is Team.BLUE else TEAM_SIZE) + slot]

    def team_units(self, team: Team) -> tuple[UnitState, ...]:
        base = 0 if team is Team.BLUE else TEAM_SIZE
        return self.units[base : base + TEAM_SIZE]

    def living(self, team: Team) -> list[UnitState]:
        return [u for u in self.team_units(team) if u.alive]

    def occupant(self, tile: int) -> UnitState | None:
        for u in self.units:
            if u.alive and u.position == tile:
                return u
        return None

    def with_unit(self, unit: UnitState) -> "GameState":
        idx = (0 if unit.team is Team.BLUE else TEAM_SIZE) + unit.slot
        units = list(self.units)
        units[idx] = unit
        return replace(self, units=tuple(units))


# ---------------------------------------------------------------------------
# Engine events. apply_action / advance_phase return these so callers
# (metrics, reward shaping, the service event stream) never re-derive what
# happened from state diffs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MoveEvent:
    team: Team
    slot: int
    from_tile: int
    to_tile: int

    def to_json(self) -> dict:
        return {
            "type": "move",
            "team": self.team.value,
            "slot": self.slot,
            "from_tile": self.from_tile,
            "to_tile": self.to_tile,
        }


@dataclass(frozen=True)
class AttackEvent:
    """Combat initiation: one per executed attack action."""

    team: Team
    slot: int
    target_team: Team
    target_slot: int
    triangle: float
    effectiveness: float

    def to_json(self) -> dict:
        return {
            "type": "attack",
            "team": self.team.value,
            "slot": self.slot,
            "target_team": self.target_team.value,
            "target_slot": self.target_slot,
            "triangle": self.triangle,
            "effectiveness": self.effectiveness,
        }


@dataclass(frozen=True)
class StrikeEvent:
    attacker_team: Team
    attacker_slot: int
    defender_team: Team
    defender_slot: int
    damage: int
    defender_hp_after: int
    counter: bool
    followup: bool

    def to_json(self) -> dict:
        return {
            "type": "strike",
            "attacker_team": self.attacker_team.value,
            "attacker_slot": self.attacker_slot,
            "defender_team": self.defender_team.value,
            "defender_slot": self.defender_slot,
            "damage": self.damage,
            "defender_hp_after": self.defender_hp_after,
            "counter": self.counter,
            "followup": self.followup,
        }


@dataclass(frozen=True)
class KillEvent:
    team: Team  # team of the fallen unit
    slot: int

    def to_json(self) -> dict:
        return {"type": "kill", "team": self.team.value, "slot": self.slot}


@dataclass(frozen=True)
class WaitEvent:
    team: Team
    slot: int
    tile: int

    def to_json(self) -> dict:
        return {"type": "wait", "team": self.team.value, "slot": self.slot, "tile": self.tile}


@dataclass(frozen=True)
class PhaseEvent:
    phase: Team

    def to_json(self) -> dict:
        return {"type": "phase", "phase": self.phase.value}


@dataclass(frozen=True)
class GameOverEvent:
    outcome: Outcome

    def to_json(self) -> dict:
        return {"type": "game_over", "outcome": self.outcome.value}


Event = MoveEvent | AttackEvent | StrikeEvent | KillEvent | WaitEvent | PhaseEvent | GameOverEvent
