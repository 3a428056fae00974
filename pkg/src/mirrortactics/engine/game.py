"""Game lifecycle: setup, action resolution, phase cycling, termination.

States are immutable; ``apply_action`` and ``advance_phase`` return new
snapshots plus the event list describing what happened. The engine never
repairs an illegal action: it raises ``IllegalAction`` with a reason code and
leaves repair policy to the mirror runtime.
"""

from __future__ import annotations

import random
from dataclasses import replace

from .board import attackable_targets, reachable_tiles
from .config import GameConfig, row_flip_tile
from .model import (
    ACTION_ATTACK,
    ACTION_MOVE,
    ACTION_WAIT,
    TEAM_SIZE,
    ActionTriple,
    AttackEvent,
    CombatForecast,
    ConfigError,
    Event,
    GameOverEvent,
    GameState,
    IllegalAction,
    IllegalQuery,
    KillEvent,
    MoveEvent,
    MoveType,
    Outcome,
    PhaseEvent,
    PhaseError,
    StrikeEvent,
    Team,
    UnitSpec,
    UnitState,
    WaitEvent,
    Weapon,
    manhattan,
)
from .rules import (
    can_counter,
    effectiveness_multiplier,
    has_followup,
    per_hit_damage,
    triangle_multiplier,
)

STAT_KEYS = ("hp", "atk", "spd", "def", "res")


def roll_spec(config: GameConfig, move_type: MoveType, weapon: Weapon, rng: random.Random) -> UnitSpec:
    """Draw stats uniformly from the configured bounds; armor units get the
    configured attack/defense bonus and resistance penalty."""
    stats = {k: rng.randint(*config.stat_bounds[k]) for k in STAT_KEYS}
    if move_type is MoveType.ARMOR:
        for k, delta in config.armor_adjust.items():
            stats[k] = max(0, stats[k] + delta)
        stats["hp"] = max(1, stats["hp"])
    return UnitSpec(
        move_type=move_type,
        weapon=weapon,
        hp=stats["hp"],
        atk=stats["atk"],
        defense=stats["def"],
        res=stats["res"],
        spd=stats["spd"],
    )


def mirror_team(blue: tuple[UnitState, ...]) -> tuple[UnitState, ...]:
    """Red copy of a blue team: same specs per slot, positions row-flipped."""
    return tuple(
        UnitState(
            spec=u.spec,
            slot=u.slot,
            team=Team.RED,
            position=row_flip_tile(u.position),
            current_hp=u.spec.hp,
            acted=False,
        )
        for u in blue
    )


def _build_blue(config: GameConfig, rng: random.Random, team: list[UnitSpec] | None) -> tuple[UnitState, ...]:
    specs: list[UnitSpec]
    if team is not None:
        if len(team) != TEAM_SIZE:
            raise ConfigError("blue team must have exactly 4 units")
        specs = list(team)
    else:
        specs = [
            roll_spec(config, MoveType(m), Weapon(w), rng) for m, w in config.blue_team
        ]
    return tuple(
        UnitState(spec=s, slot=i, team=Team.BLUE, position=config.blue_starts[i], current_hp=s.hp)
        for i, s in enumerate(specs)
    )


def new_game(
    config: GameConfig,
    mode: str = "standard",
    mirror_team_specs: list[UnitSpec] | None = None,
    seed: int = 0,
) -> GameState:
    """Set up a fresh game. Blue phase always starts.

    standard: blue uses the configured composition, red's unit and weapon
    types are randomized per slot; both teams' stats are drawn from the
    configured bounds with the seeded RNG.

    mirror: red is the row-flip mirror of the blue team (types, weapons,
    stats, positions). The blue team may be supplied via
    ``mirror_team_specs``; otherwise it is rolled like a standard game.
    """
    if mode not in ("standard", "mirror"):
        raise ConfigError(f"unknown game mode {mode!r}")
    rng = random.Random(seed)
    blue = _build_blue(config, rng, mirror_team_specs)

    if mode == "mirror":
        red = mirror_team(blue)
    else:
        red_units = []
        for i in range(TEAM_SIZE):
            move_type = rng.choice(list(MoveType))
            weapon = rng.choice(list(Weapon))
            spec = roll_spec(config, move_type, weapon, rng)
            red_units.append(
                UnitState(spec=spec, slot=i, team=Team.RED, position=config.red_starts[i], current_hp=spec.hp)
            )
        red = tuple(red_units)

    return GameState(
        tile_map=config.tile_map,
        units=blue + red,
        phase=Team.BLUE,
        learner_action_count=0,
        rng_seed=seed,
    )


def combat_forecast(state: GameState, attacker: UnitState, defender: UnitState) -> CombatForecast:
    """Project a full combat: strike order attacker, counter, then follow-ups."""
    if not attacker.alive or not defender.alive:
        raise IllegalQuery("combat forecast requires two living units")
    dmg_a = per_hit_damage(attacker.spec, defender.spec)
    dmg_d = per_hit_damage(defender.spec, attacker.spec)
    counter = can_counter(attacker.spec, defender.spec)
    follow_a = has_followup(attacker.spec, defender.spec)
    follow_d = has_followup(defender.spec, attacker.spec)

    hp_a, hp_d = attacker.current_hp, defender.current_hp
    for striker, dmg in _strike_sequence(counter, follow_a, follow_d, dmg_a, dmg_d):
        if hp_a <= 0 or hp_d <= 0:
            break
        if striker == "attacker":
            hp_d = max(0, hp_d - dmg)
        else:
            hp_a = max(0, hp_a - dmg)

    return CombatForecast(
        per_hit_damage_attacker=dmg_a,
        per_hit_damage_defender=dmg_d,
        attacker_followup=follow_a,
        defender_followup=follow_d,
        defender_can_counter=counter,
        projected_attacker_hp=hp_a,
        projected_defender_hp=hp_d,
    )


def _strike_sequence(
    counter: bool, follow_a: bool, follow_d: bool, dmg_a: int, dmg_d: int
) -> list[tuple[str, int]]:
    seq = [("attacker", dmg_a)]
    if counter:
        seq.append(("defender", dmg_d))
    if follow_a:
        seq.append(("attacker", dmg_a))
    if counter and follow_d:
        seq.append(("defender", dmg_d))
    return seq


def legal_action(state: GameState, unit: UnitState, action: ActionTriple, config: GameConfig) -> bool:
    """Exact legality: membership in the wait/move/attack legal sets."""
    if state.outcome is not Outcome.ONGOING:
        return False
    if unit.team is not state.phase or not unit.alive or unit.acted:
        return False
    if action.action_type == ACTION_WAIT:
        return action.tile == unit.position
    reach = reachable_tiles(state, unit, config)
    if action.action_type == ACTION_MOVE:
        return action.tile in reach
    pairs = attackable_targets(state, unit, config, reach)
    return (action.target, action.tile) in pairs


def apply_action(
    state: GameState, team: Team, unit_slot: int, action: ActionTriple, config: GameConfig
) -> tuple[GameState, list[Event]]:
    """Execute one unit's turn. Raises ``IllegalAction`` on any violation."""
    if state.outcome is not Outcome.ONGOING:
        raise IllegalAction("terminal_state", "game already decided")
    unit = state.unit(team, unit_slot)
    if team is not state.phase:
        raise IllegalAction("wrong_phase", f"{team.value} acting in {state.phase.value} phase")
    if not unit.alive:
        raise IllegalAction("unit_dead", f"slot {unit_slot}")
    if unit.acted:
        raise IllegalAction("already_acted", f"slot {unit_slot}")

    events: list[Event] = []

    if action.action_type == ACTION_WAIT:
        if action.tile != unit.position:
            raise IllegalAction("bad_wait_tile", f"tile {action.tile} != current {unit.position}")
        new_state = state.with_unit(replace(unit, acted=True))
        events.append(WaitEvent(team, unit_slot, unit.position))

    elif action.action_type == ACTION_MOVE:
        reach = reachable_tiles(state, unit, config)
        if action.tile not in reach:
            raise IllegalAction("unreachable_tile", f"tile {action.tile}")
        if action.tile != unit.position:
            events.append(MoveEvent(team, unit_slot, unit.position, action.tile))
        new_state = state.with_unit(replace(unit, position=action.tile, acted=True))

    else:
        reach = reachable_tiles(state, unit, config)
        pairs = attackable_targets(state, unit, config, reach)
        if (action.target, action.tile) not in pairs:
            raise IllegalAction("invalid_attack", f"target {action.target} from tile {action.tile}")
        new_state, combat_events = _resolve_combat(state, unit, action.tile, action.target, config)
        events.extend(combat_events)

    if team is Team.BLUE:
        new_state = replace(new_state, learner_action_count=new_state.learner_action_count + 1)

    decided = _decide_outcome(new_state, config)
    if decided is not new_state.outcome:
        new_state = replace(new_state, outcome=decided)
        events.append(GameOverEvent(decided))
    return new_state, events


def _resolve_combat(
    state: GameState, attacker: UnitState, launch_tile: int, target_slot: int, config: GameConfig
) -> tuple[GameState, list[Event]]:
    defender = state.unit(attacker.team.opponent, target_slot)
    forecast = combat_forecast(state, attacker, defender)
    events: list[Event] = []

    if launch_tile != attacker.position:
        events.append(MoveEvent(attacker.team, attacker.slot, attacker.position, launch_tile))
    attacker = replace(attacker, position=launch_tile, acted=True)
    state = state.with_unit(attacker)

    events.append(
        AttackEvent(
            team=attacker.team,
            slot=attacker.slot,
            target_team=defender.team,
            target_slot=defender.slot,
            triangle=triangle_multiplier(attacker.spec.weapon, defender.spec.weapon),
            effectiveness=effectiveness_multiplier(attacker.spec.weapon, defender.spec.move_type),
        )
    )

    seq = _strike_sequence(
        forecast.defender_can_counter,
        forecast.attacker_followup,
        forecast.defender_followup,
        forecast.per_hit_damage_attacker,
        forecast.per_hit_damage_defender,
    )
    seen_attacker_strike = False
    for striker_side, dmg in seq:
        if not attacker.alive or not defender.alive:
            break
        if striker_side == "attacker":
            striker, victim = attacker, defender
            counter = False
            followup = seen_attacker_strike
            seen_attacker_strike = True
        else:
            striker, victim = defender, attacker
            counter = True
            followup = False  # a second defender strike is both; counter flag wins
        victim = victim.damaged(dmg)
        events.append(
            StrikeEvent(
                attacker_team=striker.team,
                attacker_slot=striker.slot,
                defender_team=victim.team,
                defender_slot=victim.slot,
                damage=dmg,
                defender_hp_after=victim.current_hp,
                counter=counter,
                followup=followup,
            )
        )
        if striker_side == "attacker":
            defender = victim
        else:
            attacker = victim
        if not victim.alive:
            events.append(KillEvent(victim.team, victim.slot))

    state = state.with_unit(attacker).with_unit(defender)
    return state, events


def _decide_outcome(state: GameState, config: GameConfig) -> Outcome:
    blue_alive = any(u.alive for u in state.team_units(Team.BLUE))
    red_alive = any(u.alive for u in state.team_units(Team.RED))
    if not red_alive:
        return Outcome.BLUE_WIN
    if not blue_alive:
        return Outcome.RED_WIN
    if state.learner_action_count >= config.max_learner_actions:
        return Outcome.TIE
    return Outcome.ONGOING


def outcome(state: GameState, config: GameConfig) -> Outcome:
    return _decide_outcome(state, config)


def advance_phase(state: GameState) -> tuple[GameState, list[Event]]:
    """Flip the phase once every living unit of the active team has acted."""
    pending = [u for u in state.living(state.phase) if not u.acted]
    if pending:
        raise PhaseError(
            f"{len(pending)} {state.phase.value} unit(s) have not acted: slots "
            + ",".join(str(u.slot) for u in pending)
        )
    units = tuple(replace(u, acted=False) if u.team is state.phase else u for u in state.units)
    new_state = replace(state, units=units, phase=state.phase.opponent)
    return new_state, [PhaseEvent(new_state.phase)]


def phase_complete(state: GameState) -> bool:
    return all(u.acted for u in state.living(state.phase))
