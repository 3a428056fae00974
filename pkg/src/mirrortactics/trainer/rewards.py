"""Extrinsic reward shaping over engine event streams.

Reward range follows the [-1, 1] per-component convention: +1 for each enemy
kill and for winning, -1 for each own death, for losing, and for the
action-cap tie, +0.3 for a completed valid action. A step's reward covers
everything its action caused, including the opposing scripted phase it
triggered.
"""

from __future__ import annotations

from ..engine import Event, GameOverEvent, KillEvent, Outcome, Team

REWARD_KILL = 1.0
REWARD_WIN = 1.0
REWARD_DEATH = -1.0
REWARD_LOSS = -1.0
REWARD_TIE = -1.0
REWARD_VALID_ACTION = 0.3

# loosest possible per-episode bounds under the constants above
EPISODE_REWARD_MIN = REWARD_TIE + 4 * REWARD_DEATH + REWARD_LOSS
EPISODE_REWARD_MAX = 4 * REWARD_KILL + REWARD_WIN + 20 * REWARD_VALID_ACTION


def shaped_reward(events: list[Event], learner: Team, action_was_valid: bool) -> float:
    """Per-step extrinsic reward for the learner team.

    ``action_was_valid`` is whether the learner's raw action was legal as
    chosen; repaired actions forfeit the +0.3 so the validity signal stays
    learnable.
    """
    reward = REWARD_VALID_ACTION if action_was_valid else 0.0
    for event in events:
        if isinstance(event, KillEvent):
            reward += REWARD_DEATH if event.team is learner else REWARD_KILL
        elif isinstance(event, GameOverEvent):
            if event.outcome is Outcome.TIE:
                reward += REWARD_TIE
            elif (event.outcome is Outcome.BLUE_WIN) == (learner is Team.BLUE):
                reward += REWARD_WIN
            else:
                reward += REWARD_LOSS
    return reward
