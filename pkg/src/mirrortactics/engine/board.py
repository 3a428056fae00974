"""Board queries: movement reachability and attack target enumeration."""

from __future__ import annotations

from .config import GameConfig
from .model import (
    BOARD_HEIGHT,
    BOARD_WIDTH,
    NUM_TILES,
    GameState,
    IllegalQuery,
    Team,
    UnitState,
    manhattan,
    tile_col,
    tile_index,
    tile_row,
)
from .rules import terrain_cost

# Orthogonal neighbours per tile, precomputed once (grid shape is fixed).
NEIGHBORS: list[tuple[int, ...]] = []
for _t in range(NUM_TILES):
    _r, _c = _t // BOARD_WIDTH, _t % BOARD_WIDTH
    _ns = []
    if _r > 0:
        _ns.append(_t - BOARD_WIDTH)
    if _r < BOARD_HEIGHT - 1:
        _ns.append(_t + BOARD_WIDTH)
    if _c > 0:
        _ns.append(_t - 1)
    if _c < BOARD_WIDTH - 1:
        _ns.append(_t + 1)
    NEIGHBORS.append(tuple(_ns))


def _check_can_act(unit: UnitState) -> None:
    if not unit.alive:
        raise IllegalQuery(f"{unit.team.value} slot {unit.slot} is dead")
    if unit.acted:
        raise IllegalQuery(f"{unit.team.value} slot {unit.slot} already acted this phase")


def occupancy(state: GameState) -> list[Team | None]:
    occ: list[Team | None] = [None] * NUM_TILES
    for u in state.units:
        if u.alive:
            occ[u.position] = u.team
    return occ


def reachable_tiles(state: GameState, unit: UnitState, config: GameConfig) -> set[int]:
    """Tiles the unit may end its move on, own tile included.

    Cost-limited flood fill over orthogonal neighbours. Enemy-occupied tiles
    block pass-through; friendly-occupied tiles may be crossed but not ended
    on; terrain costs come from the movement rules.
    """
    _check_can_act(unit)
    budget = config.movement_budget(unit.spec.move_type)
    occ = occupancy(state)
    terrain = state.tile_map.terrain
    enemy = unit.team.opponent

    best = [budget + 1] * NUM_TILES
    start = unit.position
    best[start] = 0
    frontier = [start]
    while frontier:
        nxt: list[int] = []
        for t in frontier:
            base = best[t]
            for n in NEIGHBORS[t]:
                if occ[n] is enemy:
                    continue
                step = terrain_cost(terrain[n], unit.spec.move_type)
                if step is None:
                    continue
                cost = base + step
                if cost <= budget and cost < best[n]:
                    best[n] = cost
                    nxt.append(n)
        frontier = nxt

    result = {t for t in range(NUM_TILES) if best[t] <= budget and occ[t] is None}
    result.add(start)
    return result


def attackable_targets(
    state: GameState, unit: UnitState, config: GameConfig, reach: set[int] | None = None
) -> list[tuple[int, int]]:
    """All (target slot, launch tile) pairs the unit can attack this turn.

    A pair is valid when the launch tile is reachable and sits exactly at the
    unit's weapon range from the target. Sorted for determinism.
    """
    if reach is None:
        reach = reachable_tiles(state, unit, config)
    rng = unit.spec.attack_range
    pairs: list[tuple[int, int]] = []
    for foe in state.living(unit.team.opponent):
        for t in reach:
            if manhattan(t, foe.position) == rng:
                pairs.append((foe.slot, t))
    pairs.sort()
    return pairs


def launch_tiles_for(pairs: list[tuple[int, int]], target_slot: int) -> list[int]:
    return [t for s, t in pairs if s == target_slot]
