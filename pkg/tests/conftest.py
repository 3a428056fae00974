import random

import pytest

from mirrortactics.engine import (
    GameState,
    MoveType,
    Outcome,
    Team,
    UnitSpec,
    UnitState,
    Weapon,
    default_config,
)

MOVE_TYPES = list(MoveType)
WEAPONS = list(Weapon)


@pytest.fixture(scope="session")
def config():
    return default_config()


def random_spec(rng: random.Random) -> UnitSpec:
    return UnitSpec(
        move_type=rng.choice(MOVE_TYPES),
        weapon=rng.choice(WEAPONS),
        hp=rng.randint(35, 50),
        atk=rng.randint(25, 45),
        defense=rng.randint(15, 35),
        res=rng.randint(10, 30),
        spd=rng.randint(20, 40),
    )


def random_state(rng: random.Random, config, min_alive_per_team: int = 1) -> GameState:
    """A coherent mid-game snapshot: random specs, positions, hp, phase.

    At least ``min_alive_per_team`` units per team are alive, no two living
    units share a tile, and the action cap has not been hit, so the state is
    ongoing and queryable.
    """
    tiles = rng.sample(range(48), 8)
    units = []
    for team, offset in ((Team.BLUE, 0), (Team.RED, 4)):
        alive_count = rng.randint(min_alive_per_team, 4)
        alive_slots = set(rng.sample(range(4), alive_count))
        for slot in range(4):
            spec = random_spec(rng)
            alive = slot in alive_slots
            units.append(
                UnitState(
                    spec=spec,
                    slot=slot,
                    team=team,
                    position=tiles[offset + slot] if alive else -1,
                    current_hp=rng.randint(1, spec.hp) if alive else 0,
                    acted=False,
                )
            )
    return GameState(
        tile_map=config.tile_map,
        units=tuple(units),
        phase=rng.choice([Team.BLUE, Team.RED]),
        learner_action_count=rng.randint(0, config.max_learner_actions - 1),
        rng_seed=rng.randint(0, 2**31),
        outcome=Outcome.ONGOING,
    )


def flood_fill_oracle(state: GameState, unit: UnitState, config) -> set[int]:
    """Independent brute-force reachability: Bellman-style relaxation."""
    from mirrortactics.engine import NUM_TILES, Terrain

    budget = config.movement_budget(unit.spec.move_type)
    occupied = {}
    for u in state.units:
        if u.alive:
            occupied[u.position] = u.team

    def enter_cost(tile: int) -> float:
        terr = state.tile_map.terrain[tile]
        if unit.spec.move_type.value == "flying":
            return 1
        if terr is Terrain.PLAIN:
            return 1
        if terr is Terrain.FOREST:
            return float("inf") if unit.spec.move_type.value == "cavalry" else 2
        return float("inf")

    dist = {unit.position: 0}
    for _ in range(NUM_TILES):
        changed = False
        for t, d in list(dist.items()):
            r, c = divmod(t, 6)
            for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if not (0 <= nr < 8 and 0 <= nc < 6):
                    continue
                n = nr * 6 + nc
                if occupied.get(n) == unit.team.opponent:
                    continue
                nd = d + enter_cost(n)
                if nd <= budget and nd < dist.get(n, float("inf")):
                    dist[n] = nd
                    changed = True
        if not changed:
            break
    result = {t for t in dist if t not in occupied}
    result.add(unit.position)
    return result
