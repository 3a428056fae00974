"""Rule-based Standard-Mode enemy: greedy attacks with priority turn order.

The controller is team-generic (the aggressive scripted demonstrator reuses
it for the blue side) but the default entry points keep the red-phase
contract.
"""

from __future__ import annotations

import math

from .engine import (
    ACTION_ATTACK,
    ACTION_MOVE,
    ACTION_WAIT,
    ActionTriple,
    Event,
    GameConfig,
    GameState,
    IllegalQuery,
    Team,
    UnitState,
    apply_action,
    attackable_targets,
    combat_forecast,
    manhattan,
    reachable_tiles,
    tile_col,
)


def order_units(state: GameState, config: GameConfig, team: Team | None = None) -> list[int]:
    """Turn order for the scripted team's phase.

    Priority: melee before ranged, then fewest phases needed to reach the
    nearest foe (manhattan distance over movement budget, rounded up), then
    leftmost column. Tile index and slot break any remaining ties so the
    order is total.
    """
    if team is None:
        team = state.phase
    foes = state.living(team.opponent)

    def key(u: UnitState) -> tuple:
        budget = config.movement_budget(u.spec.move_type)
        if foes:
            phases = min(math.ceil(manhattan(u.position, f.position) / budget) for f in foes)
        else:
            phases = 0
        return (0 if u.spec.is_melee else 1, phases, tile_col(u.position), u.position, u.slot)

    return [u.slot for u in sorted(state.living(team), key=key)]


def total_damage_to(state: GameState, attacker: UnitState, defender: UnitState) -> int:
    """Damage the full combat would deal to the defender."""
    forecast = combat_forecast(state, attacker, defender)
    return defender.current_hp - forecast.projected_defender_hp


def pick_attack(
    state: GameState,
    unit: UnitState,
    pairs: list[tuple[int, int]],
    restrict_to: set[int] | None = None,
) -> ActionTriple:
    """Choose the attack dealing the most total damage.

    Ties break on lowest post-combat target hp, then lowest target slot. The
    launch tile prefers the unit's current tile, else the lowest tile index.
    """
    slots = sorted({s for s, _ in pairs if restrict_to is None or s in restrict_to})
    best: tuple | None = None
    for s in slots:
        defender = state.unit(unit.team.opponent, s)
        dmg = total_damage_to(state, unit, defender)
        post_hp = defender.current_hp - dmg
        cand = (-dmg, post_hp, s)
        if best is None or cand < best:
            best = cand
    target = best[2]
    launches = [t for s, t in pairs if s == target]
    launch = unit.position if unit.position in launches else min(launches)
    return ActionTriple(ACTION_ATTACK, launch, target)


def select_action(state: GameState, unit: UnitState, config: GameConfig) -> ActionTriple:
    """Greedy decision for one unit; the result is always engine-legal.

    Attack the highest-damage target whenever any foe is attackable.
    Otherwise approach the nearest foe (or hold position, per config).
    """
    if not unit.alive or unit.acted:
        raise IllegalQuery(f"{unit.team.value} slot {unit.slot} cannot act")
    reach = reachable_tiles(state, unit, config)
    pairs = attackable_targets(state, unit, config, reach)
    if pairs:
        return pick_attack(state, unit, pairs)

    if config.standard_ai_movement == "approach":
        foes = state.living(unit.team.opponent)
        if foes:
            def dist(tile: int) -> int:
                return min(manhattan(tile, f.position) for f in foes)

            best_tile = min(reach, key=lambda t: (dist(t), t))
            if best_tile != unit.position:
                return ActionTriple(ACTION_MOVE, best_tile, 0)
    return ActionTriple(ACTION_WAIT, unit.position, 0)


def play_phase(
    state: GameState, config: GameConfig, team: Team | None = None
) -> tuple[GameState, list[Event]]:
    """Run the whole scripted phase, applying each unit's action in order.

    The queue is fixed when the phase starts; units that die to a counter
    before their turn are skipped. Stops early if the game ends.
    """
    if team is None:
        team = state.phase
    events: list[Event] = []
    for slot in order_units(state, config, team):
        unit = state.unit(team, slot)
        if not unit.alive or unit.acted:
            continue
        action = select_action(state, unit, config)
        state, evs = apply_action(state, team, slot, action, config)
        events.extend(evs)
        if state.outcome.value != "ongoing":
            break
    return state, events
