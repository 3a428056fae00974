"""Observation vectors, per-branch action masks, and board-flip transforms.

The observation is 8 blocks of 17 numbers (136 total), every component
normalized into [0, 1]. Blocks are perspective-relative: the acting unit
first, then its remaining teammates by slot, then the opposing team by slot,
so one policy can play either side. Dead units contribute an all-zero block.

Per block: 5 stats (current hp, atk, def, res, spd, each /60), move-type
one-hot (4), weapon one-hot (5), row/7, col/5, manhattan distance to the
acting unit /12.
"""

from __future__ import annotations

from dataclasses import replace
from enum import Enum

import numpy as np

from .engine import (
    ACTION_ATTACK,
    ACTION_MOVE,
    BOARD_HEIGHT,
    BOARD_WIDTH,
    NUM_TILES,
    TEAM_SIZE,
    ActionTriple,
    GameConfig,
    GameState,
    IllegalQuery,
    MOVE_TYPES,
    Team,
    TileMap,
    UnitState,
    WEAPONS,
    attackable_targets,
    manhattan,
    reachable_tiles,
    tile_col,
    tile_index,
    tile_row,
)

OBS_SIZE = 136
BLOCK_SIZE = 17
STAT_CAP = 60.0
ROW_CAP = float(BOARD_HEIGHT - 1)
COL_CAP = float(BOARD_WIDTH - 1)
DIST_CAP = float(BOARD_WIDTH - 1 + BOARD_HEIGHT - 1)

BRANCH_SIZES = (3, NUM_TILES, TEAM_SIZE)
ACTION_ONEHOT_SIZE = sum(BRANCH_SIZES)  # 55

_MOVE_INDEX = {m: i for i, m in enumerate(MOVE_TYPES)}
_WEAPON_INDEX = {w: i for i, w in enumerate(WEAPONS)}


class FlipAxis(str, Enum):
    COLS = "cols"
    ROWS = "rows"
    BOTH = "both"


def flip_tile(tile: int, axis: FlipAxis) -> int:
    r, c = tile_row(tile), tile_col(tile)
    if axis in (FlipAxis.ROWS, FlipAxis.BOTH):
        r = BOARD_HEIGHT - 1 - r
    if axis in (FlipAxis.COLS, FlipAxis.BOTH):
        c = BOARD_WIDTH - 1 - c
    return tile_index(r, c)


def encode_observation(state: GameState, team: Team, acting_slot: int) -> np.ndarray:
    """Build the 136-component observation for the acting unit."""
    actor = state.unit(team, acting_slot)
    if not actor.alive:
        raise IllegalQuery("cannot encode observation for a dead unit")

    own = state.team_units(team)
    opp = state.team_units(team.opponent)
    blocks = [actor]
    blocks += [u for u in own if u.slot != acting_slot]
    blocks += list(opp)

    obs = np.zeros(OBS_SIZE, dtype=np.float32)
    anchor = actor.position
    for i, u in enumerate(blocks):
        if not u.alive:
            continue
        base = i * BLOCK_SIZE
        spec = u.spec
        obs[base + 0] = min(u.current_hp, STAT_CAP) / STAT_CAP
        obs[base + 1] = min(spec.atk, STAT_CAP) / STAT_CAP
        obs[base + 2] = min(spec.defense, STAT_CAP) / STAT_CAP
        obs[base + 3] = min(spec.res, STAT_CAP) / STAT_CAP
        obs[base + 4] = min(spec.spd, STAT_CAP) / STAT_CAP
        obs[base + 5 + _MOVE_INDEX[spec.move_type]] = 1.0
        obs[base + 9 + _WEAPON_INDEX[spec.weapon]] = 1.0
        obs[base + 14] = tile_row(u.position) / ROW_CAP
        obs[base + 15] = tile_col(u.position) / COL_CAP
        obs[base + 16] = manhattan(u.position, anchor) / DIST_CAP
    return obs


class BranchMasks:
    """0/1 masks for the three action branches.

    The wait bit and the current tile are always admitted. When no attack is
    possible the target branch is left fully open so it stays samplable; the
    target is ignored unless the action type is attack.
    """

    __slots__ = ("action_type", "tile", "target")

    def __init__(self, action_type: np.ndarray, tile: np.ndarray, target: np.ndarray):
        self.action_type = action_type
        self.tile = tile
        self.target = target

    def admits(self, action: ActionTriple) -> bool:
        ok = bool(self.action_type[action.action_type] and self.tile[action.tile])
        if action.action_type == ACTION_ATTACK:
            ok = ok and bool(self.target[action.target])
        return ok

    def to_json(self) -> dict:
        return {
            "action_type": self.action_type.astype(int).tolist(),
            "tile": self.tile.astype(int).tolist(),
            "target": self.target.astype(int).tolist(),
        }

    @staticmethod
    def from_json(obj: dict) -> "BranchMasks":
        return BranchMasks(
            np.asarray(obj["action_type"], dtype=np.uint8),
            np.asarray(obj["tile"], dtype=np.uint8),
            np.asarray(obj["target"], dtype=np.uint8),
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BranchMasks)
            and np.array_equal(self.action_type, other.action_type)
            and np.array_equal(self.tile, other.tile)
            and np.array_equal(self.target, other.target)
        )


def action_masks(state: GameState, team: Team, acting_slot: int, config: GameConfig) -> BranchMasks:
    unit = state.unit(team, acting_slot)
    if not unit.alive or unit.acted:
        raise IllegalQuery("masks require a living, unacted unit")

    reach = reachable_tiles(state, unit, config)
    pairs = attackable_targets(state, unit, config, reach)

    type_mask = np.zeros(3, dtype=np.uint8)
    type_mask[0] = 1
    if reach - {unit.position}:
        type_mask[ACTION_MOVE] = 1
    if pairs:
        type_mask[ACTION_ATTACK] = 1

    tile_mask = np.zeros(NUM_TILES, dtype=np.uint8)
    for t in reach:
        tile_mask[t] = 1
    for _, t in pairs:
        tile_mask[t] = 1

    target_mask = np.zeros(TEAM_SIZE, dtype=np.uint8)
    if pairs:
        for s, _ in pairs:
            target_mask[s] = 1
    else:
        target_mask[:] = 1
    return BranchMasks(type_mask, tile_mask, target_mask)


def flip_state(state: GameState, axis: FlipAxis) -> GameState:
    """Remap every position (and the terrain grid) through the flip."""
    terrain = list(state.tile_map.terrain)
    flipped_terrain = [terrain[flip_tile(t, axis)] for t in range(NUM_TILES)]
    units = tuple(
        u if not u.alive else replace(u, position=flip_tile(u.position, axis)) for u in state.units
    )
    return replace(state, tile_map=TileMap(tuple(flipped_terrain)), units=units)


def flip_action(action: ActionTriple, axis: FlipAxis) -> ActionTriple:
    return replace(action, tile=flip_tile(action.tile, axis))


def action_onehot(action: ActionTriple) -> np.ndarray:
    """3+48+4 one-hot concatenation, the discriminator's action input.

    The target block is zeroed for non-attack actions: the branch value is
    semantically undefined there, and feeding it through would hand the
    discriminator an artifact to separate on.
    """
    vec = np.zeros(ACTION_ONEHOT_SIZE, dtype=np.float32)
    vec[action.action_type] = 1.0
    vec[3 + action.tile] = 1.0
    if action.action_type == ACTION_ATTACK:
        vec[3 + NUM_TILES + action.target] = 1.0
    return vec
