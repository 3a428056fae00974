"""Deploying a trained policy as the mirror-side enemy.

The policy emits raw branch choices that are individually mask-legal but may
be jointly illegal (an attack whose tile/target pair is not a valid combo).
``repair_action`` applies the demotion chain attack -> move -> wait so every
executed action is engine-legal, and counts how often each repair fired --
those counters are the standing diagnostic for how often the policy proposes
unusable attacks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import standard_ai
from .encoding import BranchMasks, action_masks, encode_observation
from .engine import (
    ACTION_ATTACK,
    ACTION_MOVE,
    ACTION_WAIT,
    ActionTriple,
    Event,
    GameConfig,
    GameState,
    Team,
    UnitState,
    apply_action,
    attackable_targets,
    mirror_team,
    reachable_tiles,
)
from .neural import Params, PolicyArch, load_checkpoint, policy_forward

REPAIR_CATEGORIES = (
    "legal",
    "attack_redirected",
    "attack_to_move",
    "attack_to_wait",
    "move_to_wait",
    "wait_tile_fixed",
)


def repair_action(
    state: GameState,
    unit: UnitState,
    raw: ActionTriple,
    config: GameConfig,
    rng: np.random.Generator,
) -> tuple[ActionTriple, str]:
    """Map a raw action to a legal one; returns (action, repair category).

    Attacks with an invalid tile/target combination are redirected to a
    uniformly random valid (target, launch tile) pair when one exists,
    demoted to a move when the raw tile is at least reachable, and to a wait
    otherwise. Moves to unreachable tiles become waits.
    """
    reach = reachable_tiles(state, unit, config)

    if raw.action_type == ACTION_ATTACK:
        pairs = attackable_targets(state, unit, config, reach)
        if (raw.target, raw.tile) in pairs:
            return raw, "legal"
        if pairs:
            slot, tile = pairs[int(rng.integers(len(pairs)))]
            return ActionTriple(ACTION_ATTACK, tile, slot), "attack_redirected"
        if raw.tile in reach:
            return ActionTriple(ACTION_MOVE, raw.tile, raw.target), "attack_to_move"
        return ActionTriple(ACTION_WAIT, unit.position, raw.target), "attack_to_wait"

    if raw.action_type == ACTION_MOVE:
        if raw.tile in reach:
            return raw, "legal"
        return ActionTriple(ACTION_WAIT, unit.position, raw.target), "move_to_wait"

    if raw.tile != unit.position:
        return ActionTriple(ACTION_WAIT, unit.position, raw.target), "wait_tile_fixed"
    return raw, "legal"


def greedy_action(fwd_log_probs: list[np.ndarray]) -> ActionTriple:
    picks = [int(lp[0].argmax()) for lp in fwd_log_probs]
    return ActionTriple(picks[0], picks[1], picks[2])


def sample_action(fwd_log_probs: list[np.ndarray], rng: np.random.Generator) -> ActionTriple:
    picks = []
    for lp in fwd_log_probs:
        p = np.exp(lp[0]).astype(np.float64)
        p /= p.sum()
        picks.append(int(rng.choice(p.size, p=p)))
    return ActionTriple(picks[0], picks[1], picks[2])


@dataclass
class RepairStats:
    counts: dict = field(default_factory=lambda: {c: 0 for c in REPAIR_CATEGORIES})

    def note(self, category: str) -> None:
        self.counts[category] += 1

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def repaired(self) -> int:
        return self.total - self.counts["legal"]

    def to_json(self) -> dict:
        return dict(self.counts)


class CheckpointMismatch(Exception):
    pass


class MirrorPolicy:
    """A loaded checkpoint acting for one team with repair and stats."""

    def __init__(
        self,
        params: Params,
        arch: PolicyArch,
        config: GameConfig,
        rng: np.random.Generator | None = None,
        sample: bool = False,
    ):
        self.params = params
        self.arch = arch
        self.config = config
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.sample = sample
        self.stats = RepairStats()

    @classmethod
    def from_checkpoint(
        cls,
        path,
        config: GameConfig,
        rng: np.random.Generator | None = None,
        sample: bool = False,
        strict_config: bool = True,
    ) -> "MirrorPolicy":
        manifest, tensors = load_checkpoint(path)
        stored = manifest.get("config_hash")
        if strict_config and stored not in (None, config.config_hash()):
            raise CheckpointMismatch(
                f"checkpoint {path} was trained under game config {stored}, "
                f"current config is {config.config_hash()}; pass strict_config=False to override"
            )
        arch = PolicyArch.from_json(manifest["arch"])
        params = {k: v for k, v in tensors.items() if not k.startswith("disc.")}
        return cls(params, arch, config, rng=rng, sample=sample)

    def raw_action(self, state: GameState, team: Team, slot: int) -> ActionTriple:
        obs = encode_observation(state, team, slot)
        masks = action_masks(state, team, slot, self.config)
        fwd = policy_forward(
            self.params,
            obs[None, :],
            [masks.action_type[None, :], masks.tile[None, :], masks.target[None, :]],
        )
        if self.sample:
            return sample_action(fwd.log_probs, self.rng)
        return greedy_action(fwd.log_probs)

    def act(self, state: GameState, team: Team, slot: int) -> ActionTriple:
        unit = state.unit(team, slot)
        raw = self.raw_action(state, team, slot)
        action, category = repair_action(state, unit, raw, self.config, self.rng)
        self.stats.note(category)
        return action

    def play_phase(self, state: GameState, team: Team | None = None) -> tuple[GameState, list[Event]]:
        """Act every unit of the phase team, same turn order as the scripted enemy."""
        if team is None:
            team = state.phase
        events: list[Event] = []
        for slot in standard_ai.order_units(state, self.config, team):
            unit = state.unit(team, slot)
            if not unit.alive or unit.acted:
                continue
            action = self.act(state, team, slot)
            state, evs = apply_action(state, team, slot, action, self.config)
            events.extend(evs)
            if state.outcome.value != "ongoing":
                break
        return state, events


def mirror_setup(blue: tuple[UnitState, ...]) -> tuple[UnitState, ...]:
    """Red team mirroring blue: copied types, weapons, stats; rows flipped."""
    return mirror_team(blue)
