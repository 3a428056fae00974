"""Combat arithmetic: weapon triangle, effectiveness, per-hit damage."""

from __future__ import annotations

import math

from .model import MoveType, Terrain, UnitSpec, Weapon

# Cyclic melee advantage: winner -> loser.
_TRIANGLE_BEATS = {
    Weapon.SWORD: Weapon.AXE,
    Weapon.AXE: Weapon.LANCE,
    Weapon.LANCE: Weapon.SWORD,
}

TRIANGLE_ADVANTAGE = 1.2
TRIANGLE_DISADVANTAGE = 0.8
EFFECTIVENESS_BONUS = 1.5
FOLLOWUP_SPEED_GAP = 5


def triangle_multiplier(attacker_weapon: Weapon, defender_weapon: Weapon) -> float:
    if _TRIANGLE_BEATS.get(attacker_weapon) == defender_weapon:
        return TRIANGLE_ADVANTAGE
    if _TRIANGLE_BEATS.get(defender_weapon) == attacker_weapon:
        return TRIANGLE_DISADVANTAGE
    return 1.0


def effectiveness_multiplier(attacker_weapon: Weapon, defender_move_type: MoveType) -> float:
    if attacker_weapon is Weapon.BOW and defender_move_type is MoveType.FLYING:
        return EFFECTIVENESS_BONUS
    return 1.0


def per_hit_damage(attacker: UnitSpec, defender: UnitSpec) -> int:
    """max(0, floor(atk * triangle * effectiveness) - mitigation).

    Magic is mitigated by resistance, everything else (including bows) by
    defense. Multipliers are applied to attack and floored once, before the
    subtraction.
    """
    tri = triangle_multiplier(attacker.weapon, defender.weapon)
    eff = effectiveness_multiplier(attacker.weapon, defender.move_type)
    raw = math.floor(attacker.atk * tri * eff)
    mitigation = defender.res if attacker.weapon is Weapon.MAGIC else defender.defense
    return max(0, raw - mitigation)


def can_counter(attacker: UnitSpec, defender: UnitSpec) -> bool:
    return defender.attack_range == attacker.attack_range


def has_followup(striker: UnitSpec, other: UnitSpec) -> bool:
    return striker.spd >= other.spd + FOLLOWUP_SPEED_GAP


def terrain_cost(terrain: Terrain, move_type: MoveType) -> int | None:
    """Movement points to enter a tile; None when impassable."""
    if move_type is MoveType.FLYING:
        return 1
    if terrain is Terrain.PLAIN:
        return 1
    if terrain is Terrain.FOREST:
        return None if move_type is MoveType.CAVALRY else 2
    return None  # mountain, non-flier
