"""Trainer configuration and the named experiment presets."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


class TrainerConfigError(Exception):
    pass


@dataclass(frozen=True)
class TrainerConfig:
    ppo_lr: float = 3e-4
    ppo_batch: int = 128
    ppo_hidden: int = 256
    buffer_size: int = 2048
    time_horizon: int = 64
    epochs: int = 3
    clip_eps: float = 0.2
    gae_lambda: float = 0.95
    extrinsic_gamma: float = 0.99
    extrinsic_strength: float = 1.0
    gail_lr: float = 1e-4
    gail_hidden: int = 64
    gail_gamma: float = 0.85
    gail_strength: float = 0.0
    bc_strength: float = 0.0
    entropy_beta: float = 0.005
    env_count: int = 10
    total_steps: int = 100_000
    seed: int = 0
    opponent: str = "standard_ai"
    preset: str = "custom"
    # plumbing knobs (not part of the preset identity)
    summary_interval: int = 0  # 0 -> one row per buffer fill
    checkpoint_every_updates: int = 25
    bc_pretrain_updates: int = 0
    disc_minibatches_per_update: int = 0  # 0 -> one per PPO minibatch
    gail_reward_clip: float = 10.0

    def __post_init__(self) -> None:
        for name in ("extrinsic_strength", "gail_strength", "bc_strength"):
            if getattr(self, name) < 0:
                raise TrainerConfigError(f"{name} must be >= 0")
        for name in ("extrinsic_gamma", "gail_gamma"):
            g = getattr(self, name)
            if not 0 < g <= 1:
                raise TrainerConfigError(f"{name} must be in (0, 1]")
        if self.env_count < 1:
            raise TrainerConfigError("env_count must be >= 1")
        if self.opponent != "standard_ai":
            raise TrainerConfigError(f"unknown opponent {self.opponent!r}")
        for name in ("ppo_batch", "ppo_hidden", "buffer_size", "epochs", "total_steps"):
            if getattr(self, name) < 1:
                raise TrainerConfigError(f"{name} must be >= 1")
        if self.ppo_batch > self.buffer_size:
            raise TrainerConfigError("ppo_batch cannot exceed buffer_size")

    @property
    def uses_demos(self) -> bool:
        return self.gail_strength > 0 or self.bc_strength > 0

    @property
    def n_signals(self) -> int:
        return 1 + (1 if self.gail_strength > 0 else 0)

    def to_json(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_json(obj: dict) -> "TrainerConfig":
        known = {f.name for f in fields(TrainerConfig)}
        unknown = set(obj) - known
        if unknown:
            raise TrainerConfigError(f"unknown trainer config fields: {sorted(unknown)}")
        return TrainerConfig(**obj)

    @staticmethod
    def load(path: str | Path) -> "TrainerConfig":
        try:
            return TrainerConfig.from_json(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise TrainerConfigError(f"cannot read trainer config {path}: {exc}") from exc

    def with_overrides(self, overrides: dict) -> "TrainerConfig":
        known = {f.name: f.type for f in fields(TrainerConfig)}
        casted = {}
        for key, value in overrides.items():
            if key not in known:
                raise TrainerConfigError(f"unknown trainer config field {key!r}")
            current = getattr(self, key)
            if isinstance(current, bool):
                casted[key] = value in (True, "true", "1")
            elif isinstance(current, int):
                casted[key] = int(value)
            elif isinstance(current, float):
                casted[key] = float(value)
            else:
                casted[key] = str(value)
        return replace(self, **casted)


# The fixed table used for the model-combination experiments (PPO lr 3e-4,
# hidden 256, batch 128; GAIL lr 1e-4, hidden 64, gamma 0.85, strength 1.0;
# BC 0.5; extrinsic 0.9) is the `baseline`. `baseline_plus` widens the
# discriminator to 128 and doubles the PPO batch. `finetune_pick` carries the
# tuned BC 0.4 / extrinsic 0.5 pair instead.
_PRESETS: dict[str, dict] = {
    "ppo_only": dict(extrinsic_strength=1.0, gail_strength=0.0, bc_strength=0.0),
    "ppo_gail": dict(extrinsic_strength=0.0, gail_strength=1.0, bc_strength=0.0),
    "ppo_gail_bc": dict(extrinsic_strength=0.0, gail_strength=1.0, bc_strength=0.5),
    "baseline": dict(
        ppo_lr=0.0003,
        ppo_hidden=256,
        ppo_batch=128,
        gail_lr=0.0001,
        gail_hidden=64,
        gail_gamma=0.85,
        gail_strength=1.0,
        bc_strength=0.5,
        extrinsic_strength=0.9,
    ),
    "baseline_plus": dict(
        ppo_lr=0.0003,
        ppo_hidden=256,
        ppo_batch=256,
        gail_lr=0.0001,
        gail_hidden=128,
        gail_gamma=0.85,
        gail_strength=1.0,
        bc_strength=0.5,
        extrinsic_strength=0.9,
    ),
    "finetune_pick": dict(
        ppo_lr=0.0003,
        ppo_hidden=256,
        ppo_batch=128,
        gail_lr=0.0001,
        gail_hidden=64,
        gail_gamma=0.85,
        gail_strength=1.0,
        bc_strength=0.4,
        extrinsic_strength=0.5,
    ),
    "bc_only": dict(extrinsic_strength=0.0, gail_strength=0.0, bc_strength=1.0),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str, **overrides) -> TrainerConfig:
    if name not in _PRESETS:
        raise TrainerConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    merged = dict(_PRESETS[name])
    merged.update(overrides)
    return TrainerConfig(preset=name, **merged)
