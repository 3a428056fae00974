import random
from dataclasses import replace

import numpy as np
import pytest

from mirrortactics.encoding import (
    BLOCK_SIZE,
    FlipAxis,
    OBS_SIZE,
    action_masks,
    action_onehot,
    encode_observation,
    flip_action,
    flip_state,
    flip_tile,
)
from mirrortactics.engine import (
    ACTION_ATTACK,
    ACTION_MOVE,
    ACTION_WAIT,
    ActionTriple,
    IllegalQuery,
    MoveType,
    Team,
    attackable_targets,
    legal_action,
    reachable_tiles,
    tile_index,
)

from conftest import random_state
from test_engine import make_state


def test_observation_length_and_range(config):
    rng = random.Random(1)
    for _ in range(200):
        state = random_state(rng, config)
        for unit in state.living(state.phase):
            obs = encode_observation(state, unit.team, unit.slot)
            assert obs.shape == (OBS_SIZE,)
            assert np.all(obs >= 0.0) and np.all(obs <= 1.0)


def test_actor_block_distance_zero(config):
    state = make_state(config, [10, 11], [40, 41])
    obs = encode_observation(state, Team.BLUE, 0)
    assert obs[16] == 0.0  # distance-to-self component of block 0


def test_dead_unit_block_is_zero(config):
    state = make_state(config, [10, 11], [40, 41, 42])
    dead = replace(state.unit(Team.RED, 2), current_hp=0, position=-1)
    state = state.with_unit(dead)
    obs = encode_observation(state, Team.BLUE, 0)
    # opposing slots occupy blocks 4..7; red slot 2 is block 6
    block = obs[6 * BLOCK_SIZE : 7 * BLOCK_SIZE]
    assert np.all(block == 0.0)


def test_perspective_relative_blocks(config):
    state = make_state(config, [10, 11], [40, 41])
    obs_blue = encode_observation(state, Team.BLUE, 1)
    # acting unit (blue slot 1, tile 11) first: row 1/7, col 5/5
    assert obs_blue[14] == pytest.approx(1 / 7)
    assert obs_blue[15] == pytest.approx(5 / 5)
    obs_red = encode_observation(state, Team.RED, 0)
    assert obs_red[14] == pytest.approx((40 // 6) / 7)


def test_dead_actor_rejected(config):
    state = make_state(config, [10], [40])
    dead = replace(state.unit(Team.BLUE, 0), current_hp=0, position=-1)
    state = state.with_unit(dead)
    with pytest.raises(IllegalQuery):
        encode_observation(state, Team.BLUE, 0)


def test_masks_wait_always_set(config):
    rng = random.Random(2)
    for _ in range(100):
        state = random_state(rng, config)
        for unit in state.living(state.phase):
            masks = action_masks(state, unit.team, unit.slot, config)
            assert masks.action_type[ACTION_WAIT] == 1
            assert masks.tile[unit.position] == 1
            assert masks.action_type.sum() >= 1
            assert masks.tile.sum() >= 1
            assert masks.target.sum() >= 1


def test_masks_attack_bit(config):
    state = make_state(config, [10], [11])
    masks = action_masks(state, Team.BLUE, 0, config)
    assert masks.action_type[ACTION_ATTACK] == 1
    far = make_state(config, [tile_index(0, 0)], [tile_index(7, 5)], move_type=MoveType.ARMOR)
    masks = action_masks(far, Team.BLUE, 0, config)
    assert masks.action_type[ACTION_ATTACK] == 0
    assert np.all(masks.target == 1)  # fallback keeps branch samplable


def test_boxed_in_armor_only_waits(config):
    from mirrortactics.engine import Weapon

    center = tile_index(3, 2)
    foes = [center - 6, center + 6, center - 1, center + 1]
    # bow unit: cannot attack adjacent foes (range 2), cannot move
    state = make_state(config, [center], foes, move_type=MoveType.ARMOR, weapon=Weapon.BOW)
    masks = action_masks(state, Team.BLUE, 0, config)
    assert masks.action_type[ACTION_MOVE] == 0
    assert masks.action_type[ACTION_ATTACK] == 0
    assert masks.tile.sum() == 1 and masks.tile[center] == 1


def test_flip_tile_arithmetic():
    assert flip_tile(0, FlipAxis.COLS) == 5
    assert flip_tile(0, FlipAxis.ROWS) == 42
    assert flip_tile(0, FlipAxis.BOTH) == 47
    assert flip_tile(8, FlipAxis.ROWS) == 38


def test_flip_involution(config):
    rng = random.Random(4)
    for _ in range(100):
        state = random_state(rng, config)
        action = ActionTriple(rng.randrange(3), rng.randrange(48), rng.randrange(4))
        for axis in FlipAxis:
            assert flip_state(flip_state(state, axis), axis) == state
            assert flip_action(flip_action(action, axis), axis) == action


def test_flip_equivariance_legal_actions(config):
    rng = random.Random(6)
    checked = 0
    while checked < 300:
        state = random_state(rng, config)
        unit = next(iter(state.living(state.phase)), None)
        if unit is None:
            continue
        reach = sorted(reachable_tiles(state, unit, config))
        pairs = attackable_targets(state, unit, config)
        options = [ActionTriple(ACTION_WAIT, unit.position)]
        options += [ActionTriple(ACTION_MOVE, t) for t in reach]
        options += [ActionTriple(ACTION_ATTACK, t, s) for s, t in pairs]
        action = options[rng.randrange(len(options))]
        for axis in FlipAxis:
            f_state = flip_state(state, axis)
            f_unit = f_state.unit(unit.team, unit.slot)
            f_action = flip_action(action, axis)
            assert legal_action(f_state, f_unit, f_action, config)
        checked += 1


def test_flip_reencoding_matches(config):
    # re-encode oracle: flipping the state then encoding only changes
    # row/col components (and nothing else) on an all-plain map
    rng = random.Random(8)
    for _ in range(200):
        state = random_state(rng, config)
        unit = next(iter(state.living(state.phase)), None)
        if unit is None:
            continue
        base = encode_observation(state, unit.team, unit.slot)
        for axis in FlipAxis:
            flipped = encode_observation(flip_state(state, axis), unit.team, unit.slot)
            for b in range(8):
                s = b * BLOCK_SIZE
                assert np.array_equal(base[s : s + 14], flipped[s : s + 14])
                assert base[s + 16] == flipped[s + 16]  # manhattan preserved by flips
                if np.any(base[s : s + BLOCK_SIZE] != 0):
                    if axis in (FlipAxis.ROWS, FlipAxis.BOTH):
                        assert flipped[s + 14] == pytest.approx(1.0 - base[s + 14])
                    else:
                        assert flipped[s + 14] == base[s + 14]
                    if axis in (FlipAxis.COLS, FlipAxis.BOTH):
                        assert flipped[s + 15] == pytest.approx(1.0 - base[s + 15])
                    else:
                        assert flipped[s + 15] == base[s + 15]


def test_masked_sampling_never_selects_masked(config):
    rng = np.random.default_rng(12)
    state = make_state(config, [10], [40])
    masks = action_masks(state, Team.BLUE, 0, config)
    for mask, size in ((masks.action_type, 3), (masks.tile, 48), (masks.target, 4)):
        probs = mask.astype(np.float64)
        probs /= probs.sum()
        draws = rng.choice(size, size=5000, p=probs)
        assert np.all(mask[draws] == 1)


def test_action_onehot_layout():
    vec = action_onehot(ActionTriple(2, 10, 3))
    assert vec.shape == (55,)
    assert vec[2] == 1 and vec[3 + 10] == 1 and vec[3 + 48 + 3] == 1
    assert vec.sum() == 3
    # target block stays zero for non-attacks: the branch is not read there
    move = action_onehot(ActionTriple(1, 10, 3))
    assert move.sum() == 2
    assert np.all(move[3 + 48 :] == 0)
