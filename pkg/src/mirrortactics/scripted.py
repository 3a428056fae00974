"""Scripted demonstrators for desk-scale studies.

Three personalities stand in for human players when recording demos and
benchmarking imitation: ``aggressive`` plays the same greedy policy as the
Standard-Mode enemy, ``defensive`` retreats unless it has a clearly
favourable attack, ``random`` samples uniformly over the legal action set.
"""

from __future__ import annotations

import numpy as np

from . import standard_ai
from .engine import (
    ACTION_ATTACK,
    ACTION_MOVE,
    ACTION_WAIT,
    ActionTriple,
    GameConfig,
    GameState,
    Team,
    UnitState,
    attackable_targets,
    effectiveness_multiplier,
    manhattan,
    reachable_tiles,
    triangle_multiplier,
)

SCRIPTED_NAMES = ("aggressive", "defensive", "random")


def aggressive(state: GameState, unit: UnitState, config: GameConfig, rng: np.random.Generator) -> ActionTriple:
    return standard_ai.select_action(state, unit, config)


def _advantage_slots(state: GameState, unit: UnitState, pairs) -> set[int]:
    out = set()
    for slot in {s for s, _ in pairs}:
        foe = state.unit(unit.team.opponent, slot)
        if (
            triangle_multiplier(unit.spec.weapon, foe.spec.weapon) > 1.0
            or effectiveness_multiplier(unit.spec.weapon, foe.spec.move_type) > 1.0
        ):
            out.add(slot)
    return out


def defensive(state: GameState, unit: UnitState, config: GameConfig, rng: np.random.Generator) -> ActionTriple:
    """Attack only from strength; otherwise retreat to open space.

    An attack requires a weapon-triangle or effectiveness edge and at least
    half health. Retreat maximizes the minimum distance to any living foe
    (total distance, then lowest tile index, break ties).
    """
    reach = reachable_tiles(state, unit, config)
    pairs = attackable_targets(state, unit, config, reach)
    healthy = unit.current_hp * 2 >= unit.spec.hp
    favoured = _advantage_slots(state, unit, pairs)
    if pairs and healthy and favoured:
        return standard_ai.pick_attack(state, unit, pairs, restrict_to=favoured)

    foes = state.living(unit.team.opponent)
    if foes:
        def score(tile: int):
            dists = [manhattan(tile, f.position) for f in foes]
            return (-min(dists), -sum(dists), tile)

        best = min(reach, key=score)
        if best != unit.position:
            return ActionTriple(ACTION_MOVE, best, 0)
    return ActionTriple(ACTION_WAIT, unit.position, 0)


def random_policy(state: GameState, unit: UnitState, config: GameConfig, rng: np.random.Generator) -> ActionTriple:
    reach = sorted(reachable_tiles(state, unit, config))
    pairs = attackable_targets(state, unit, config)
    options = [ActionTriple(ACTION_WAIT, unit.position, 0)]
    options += [ActionTriple(ACTION_MOVE, t, 0) for t in reach]
    options += [ActionTriple(ACTION_ATTACK, t, s) for s, t in pairs]
    return options[int(rng.integers(len(options)))]


_POLICIES = {"aggressive": aggressive, "defensive": defensive, "random": random_policy}


def get_scripted(name: str):
    """Resolve ``scripted:<name>`` (the bare name is also accepted)."""
    key = name.split(":", 1)[1] if name.startswith("scripted:") else name
    if key not in _POLICIES:
        raise KeyError(f"unknown scripted demonstrator {name!r}; choose from {SCRIPTED_NAMES}")
    return _POLICIES[key]
