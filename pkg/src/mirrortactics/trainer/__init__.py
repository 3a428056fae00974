"""PPO + GAIL + BC training over the parallel environment pool."""

from .config import PRESET_NAMES, TrainerConfig, TrainerConfigError, preset
from .env import GameEnv, StepResult
from .gae import compute_gae, mix_and_normalize
from .loop import LOG_HEADER, TrainResult, Trainer, train
from .rewards import (
    EPISODE_REWARD_MAX,
    EPISODE_REWARD_MIN,
    REWARD_DEATH,
    REWARD_KILL,
    REWARD_LOSS,
    REWARD_TIE,
    REWARD_VALID_ACTION,
    REWARD_WIN,
    shaped_reward,
)
from .rollout import EpisodeInfo, RolloutBuffer, attach_gail_rewards, collect_rollouts, gail_reward
from .update import DemoArrays, ppo_update, update_discriminator

__all__ = [
    "DemoArrays",
    "EPISODE_REWARD_MAX",
    "EPISODE_REWARD_MIN",
    "EpisodeInfo",
    "GameEnv",
    "LOG_HEADER",
    "PRESET_NAMES",
    "REWARD_DEATH",
    "REWARD_KILL",
    "REWARD_LOSS",
    "REWARD_TIE",
    "REWARD_VALID_ACTION",
    "REWARD_WIN",
    "RolloutBuffer",
    "StepResult",
    "TrainResult",
    "Trainer",
    "TrainerConfig",
    "TrainerConfigError",
    "attach_gail_rewards",
    "collect_rollouts",
    "compute_gae",
    "gail_reward",
    "mix_and_normalize",
    "ppo_update",
    "preset",
    "shaped_reward",
    "train",
    "update_discriminator",
]
