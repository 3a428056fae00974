"""Single training environment: the learner drives blue, the scripted enemy
replies with a full red phase after every completed blue phase."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import standard_ai
from ..encoding import BranchMasks, action_masks, encode_observation
from ..engine import (
    ActionTriple,
    GameConfig,
    GameState,
    Outcome,
    Team,
    advance_phase,
    apply_action,
    new_game,
    phase_complete,
)
from ..mirror_runtime import repair_action
from .rewards import shaped_reward


@dataclass
class StepResult:
    reward: float
    done: bool
    outcome: Outcome | None
    episode_reward: float
    episode_steps: int
    action_was_valid: bool
    executed: ActionTriple


class GameEnv:
    """Episode manager around the engine for one parallel environment."""

    def __init__(self, config: GameConfig, seed_rng: np.random.Generator, repair_rng: np.random.Generator):
        self.config = config
        self.seed_rng = seed_rng
        self.repair_rng = repair_rng
        self.state: GameState | None = None
        self.acting_slot: int | None = None
        self.episode_reward = 0.0
        self.episode_steps = 0

    def reset(self) -> tuple[np.ndarray, BranchMasks]:
        seed = int(self.seed_rng.integers(0, 2**62))
        self.state = new_game(self.config, mode="standard", seed=seed)
        self.episode_reward = 0.0
        self.episode_steps = 0
        self.acting_slot = self._next_blue_slot()
        return self.observe()

    def _next_blue_slot(self) -> int | None:
        for u in self.state.team_units(Team.BLUE):
            if u.alive and not u.acted:
                return u.slot
        return None

    def observe(self) -> tuple[np.ndarray, BranchMasks]:
        obs = encode_observation(self.state, Team.BLUE, self.acting_slot)
        masks = action_masks(self.state, Team.BLUE, self.acting_slot, self.config)
        return obs, masks

    def step(self, raw: ActionTriple) -> StepResult:
        """Execute the learner's raw action (repaired to legality first).

        Everything the action causes, including the scripted red phase it may
        trigger, is attributed to this step's reward.
        """
        unit = self.state.unit(Team.BLUE, self.acting_slot)
        action, category = repair_action(self.state, unit, raw, self.config, self.repair_rng)
        valid = category == "legal"

        self.state, events = apply_action(self.state, Team.BLUE, self.acting_slot, action, self.config)

        if self.state.outcome is Outcome.ONGOING and phase_complete(self.state):
            self.state, phase_events = advance_phase(self.state)
            events.extend(phase_events)
            self.state, red_events = standard_ai.play_phase(self.state, self.config, Team.RED)
            events.extend(red_events)
            if self.state.outcome is Outcome.ONGOING:
                self.state, back_events = advance_phase(self.state)
                events.extend(back_events)

        reward = shaped_reward(events, Team.BLUE, valid)
        self.episode_reward += reward
        self.episode_steps += 1
        done = self.state.outcome is not Outcome.ONGOING
        result = StepResult(
            reward=reward,
            done=done,
            outcome=self.state.outcome if done else None,
            episode_reward=self.episode_reward,
            episode_steps=self.episode_steps,
            action_was_valid=valid,
            executed=action,
        )
        if not done:
            self.acting_slot = self._next_blue_slot()
        return result
