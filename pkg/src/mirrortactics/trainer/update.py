"""Gradient updates: the PPO/BC policy step and the discriminator step."""

from __future__ import annotations

import numpy as np

from ..neural import Adam, Params, bc_grads, disc_bce_grads, disc_bce_loss, ppo_combined
from .config import TrainerConfig
from .gae import mix_and_normalize
from .rollout import RolloutBuffer


class DemoArrays:
    """Demo dataset flattened to training arrays once, up front."""

    def __init__(self, obs, onehot, masks, actions):
        self.obs = obs
        self.onehot = onehot
        self.masks = masks
        self.actions = actions

    @staticmethod
    def from_dataset(dataset) -> "DemoArrays":
        from ..encoding import action_onehot

        n = len(dataset.records)
        obs = np.stack([r.observation for r in dataset.records]).astype(np.float32)
        onehot = np.stack([action_onehot(r.action) for r in dataset.records])
        masks = [
            np.stack([getattr(r.masks, name) for r in dataset.records]).astype(np.float32)
            for name in ("action_type", "tile", "target")
        ]
        actions = np.array(
            [[r.action.action_type, r.action.tile, r.action.target] for r in dataset.records],
            dtype=np.int64,
        )
        return DemoArrays(obs, onehot, masks, actions)

    def __len__(self) -> int:
        return self.obs.shape[0]

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        replace = len(self) < n
        return rng.choice(len(self), size=n, replace=replace)


def ppo_update(
    params: Params,
    opt: Adam,
    buffer: RolloutBuffer,
    demo: DemoArrays | None,
    tcfg: TrainerConfig,
    lr: float,
    shuffle_rng: np.random.Generator,
    demo_rng: np.random.Generator,
    policy_weight: float = 1.0,
) -> dict:
    """Epochs of shuffled minibatch steps over the buffer.

    Loss per minibatch: clipped surrogate + 0.5 * value MSE - entropy bonus,
    plus the BC cross-entropy on a fresh demo minibatch when enabled.
    """
    strengths = np.array([tcfg.extrinsic_strength, tcfg.gail_strength][: tcfg.n_signals])
    mixed_adv = mix_and_normalize(buffer.advantages, strengths)

    n = len(buffer)
    order = np.arange(n)
    totals = {"policy": 0.0, "value": 0.0, "entropy": 0.0, "bc": 0.0}
    count = 0
    for _ in range(tcfg.epochs):
        shuffle_rng.shuffle(order)
        for start in range(0, n, tcfg.ppo_batch):
            idx = order[start : start + tcfg.ppo_batch]
            batch = {
                "obs": buffer.obs[idx],
                "masks": [m[idx] for m in buffer.masks],
                "actions": buffer.actions[idx],
                "old_logp": buffer.logp[idx],
                "advantages": mixed_adv[idx],
                "returns": buffer.returns[idx],
            }
            losses, grads = ppo_combined(
                params,
                batch,
                clip_eps=tcfg.clip_eps,
                value_coef=0.5,
                entropy_beta=tcfg.entropy_beta,
                policy_weight=policy_weight,
            )
            bc_loss = 0.0
            if tcfg.bc_strength > 0 and demo is not None and len(demo):
                didx = demo.sample(tcfg.ppo_batch, demo_rng)
                bc_loss, bc_g = bc_grads(
                    params, demo.obs[didx], [m[didx] for m in demo.masks], demo.actions[didx]
                )
                for k in grads:
                    grads[k] = grads[k] + tcfg.bc_strength * bc_g[k]
            opt.step(params, grads, lr)
            totals["policy"] += losses["policy"]
            totals["value"] += losses["value"]
            totals["entropy"] += losses["entropy"]
            totals["bc"] += bc_loss
            count += 1
    return {k: v / max(count, 1) for k, v in totals.items()}


def update_discriminator(
    disc_params: Params,
    opt: Adam,
    expert_obs: np.ndarray,
    expert_onehot: np.ndarray,
    policy_obs: np.ndarray,
    policy_onehot: np.ndarray,
    lr: float,
) -> float:
    """One balanced BCE step (expert label 1, policy label 0); returns the
    post-step loss, which is what the training log reports as GAIL loss."""
    obs = np.concatenate([expert_obs, policy_obs])
    onehot = np.concatenate([expert_onehot, policy_onehot])
    labels = np.concatenate(
        [np.ones(len(expert_obs)), np.zeros(len(policy_obs))]
    )
    _, grads = disc_bce_grads(disc_params, obs, onehot, labels)
    opt.step(disc_params, grads, lr)
    return disc_bce_loss(disc_params, obs, onehot, labels)
