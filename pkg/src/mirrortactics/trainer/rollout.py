"""Rollout collection over the parallel environment pool.

Environments are stepped round-robin with one batched policy forward per
round, so two runs with the same seed produce bit-identical buffers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..encoding import ACTION_ONEHOT_SIZE, OBS_SIZE
from ..engine import ActionTriple, NUM_TILES, Outcome, TEAM_SIZE
from ..neural import Params, disc_forward, policy_forward
from .config import TrainerConfig
from .env import GameEnv
from .gae import compute_gae

BRANCHES = (3, NUM_TILES, TEAM_SIZE)


@dataclass
class EpisodeInfo:
    reward: float
    steps: int
    outcome: Outcome


@dataclass
class RolloutBuffer:
    obs: np.ndarray
    masks: list[np.ndarray]
    actions: np.ndarray
    logp: np.ndarray
    rewards: np.ndarray  # (B, S): extrinsic first, then gail
    values: np.ndarray
    dones: np.ndarray
    env_ids: np.ndarray
    valid_flags: np.ndarray
    advantages: np.ndarray = field(default=None)
    returns: np.ndarray = field(default=None)

    def __len__(self) -> int:
        return self.obs.shape[0]

    def action_onehot(self) -> np.ndarray:
        n = len(self)
        out = np.zeros((n, ACTION_ONEHOT_SIZE), dtype=np.float32)
        rows = np.arange(n)
        out[rows, self.actions[:, 0]] = 1.0
        out[rows, 3 + self.actions[:, 1]] = 1.0
        attack = self.actions[:, 0] == 2  # target block zeroed for non-attacks
        out[rows[attack], 3 + NUM_TILES + self.actions[attack, 2]] = 1.0
        return out


def _sample_branches(probs: list[np.ndarray], row: int, rng: np.random.Generator) -> tuple[int, ...]:
    picks = []
    for p in probs:
        cdf = np.cumsum(p[row].astype(np.float64))
        r = rng.random() * cdf[-1]
        picks.append(int(np.searchsorted(cdf, r, side="right").clip(0, p.shape[1] - 1)))
    return tuple(picks)


def collect_rollouts(
    params: Params,
    envs: list[GameEnv],
    tcfg: TrainerConfig,
    sample_rng: np.random.Generator,
    disc_params: Params | None = None,
) -> tuple[RolloutBuffer, list[EpisodeInfo]]:
    """Fill a buffer of ``buffer_size`` learner steps across the pool."""
    size = tcfg.buffer_size
    n_env = len(envs)
    n_sig = tcfg.n_signals

    obs_buf = np.zeros((size, OBS_SIZE), dtype=np.float32)
    mask_bufs = [np.zeros((size, k), dtype=np.float32) for k in BRANCHES]
    act_buf = np.zeros((size, 3), dtype=np.int64)
    logp_buf = np.zeros(size, dtype=np.float64)
    rew_buf = np.zeros((size, n_sig), dtype=np.float64)
    val_buf = np.zeros((size, n_sig), dtype=np.float64)
    done_buf = np.zeros(size, dtype=bool)
    env_buf = np.zeros(size, dtype=np.int32)
    valid_buf = np.zeros(size, dtype=bool)

    pending = [env.observe() for env in envs]
    episode_infos: list[EpisodeInfo] = []
    filled = 0
    while filled < size:
        take = min(n_env, size - filled)
        batch_obs = np.stack([pending[i][0] for i in range(take)])
        batch_masks = [
            np.stack([getattr(pending[i][1], name) for i in range(take)]).astype(np.float32)
            for name in ("action_type", "tile", "target")
        ]
        fwd = policy_forward(params, batch_obs, batch_masks)
        probs = fwd.probs
        for i in range(take):
            picks = _sample_branches(probs, i, sample_rng)
            action = ActionTriple(*picks)
            slot = filled
            obs_buf[slot] = batch_obs[i]
            for b in range(3):
                mask_bufs[b][slot] = batch_masks[b][i]
            act_buf[slot] = picks
            logp_buf[slot] = sum(fwd.log_probs[b][i, picks[b]] for b in range(3))
            val_buf[slot] = fwd.values[i]
            env_buf[slot] = i

            result = envs[i].step(action)
            rew_buf[slot, 0] = result.reward
            done_buf[slot] = result.done
            valid_buf[slot] = result.action_was_valid
            if result.done:
                episode_infos.append(
                    EpisodeInfo(result.episode_reward, result.episode_steps, result.outcome)
                )
                pending[i] = envs[i].reset()
            else:
                pending[i] = envs[i].observe()
            filled += 1

    buffer = RolloutBuffer(
        obs=obs_buf,
        masks=mask_bufs,
        actions=act_buf,
        logp=logp_buf,
        rewards=rew_buf,
        values=val_buf,
        dones=done_buf,
        env_ids=env_buf,
        valid_flags=valid_buf,
    )
    if disc_params is not None:
        attach_gail_rewards(buffer, disc_params, tcfg.gail_reward_clip)
    _attach_gae(buffer, params, envs, pending, tcfg)
    return buffer, episode_infos


def attach_gail_rewards(buffer: RolloutBuffer, disc_params: Params, clip: float) -> None:
    fwd = disc_forward(disc_params, buffer.obs, buffer.action_onehot())
    reward = -np.log(1.0 - fwd.d + 1e-7)
    buffer.rewards[:, 1] = np.clip(reward, 0.0, clip)


def gail_reward(disc_params: Params, obs: np.ndarray, action_onehot: np.ndarray, clip: float = 10.0) -> np.ndarray:
    """Adversarial reward -log(1 - D) for one or more (s, a) pairs."""
    fwd = disc_forward(disc_params, np.atleast_2d(obs), np.atleast_2d(action_onehot))
    return np.clip(-np.log(1.0 - fwd.d + 1e-7), 0.0, clip)


def _attach_gae(
    buffer: RolloutBuffer,
    params: Params,
    envs: list[GameEnv],
    pending,
    tcfg: TrainerConfig,
) -> None:
    n_sig = tcfg.n_signals
    gammas = np.array([tcfg.extrinsic_gamma, tcfg.gail_gamma][:n_sig])
    size = len(buffer)

    # bootstrap values for streams that end mid-episode
    need = [i for i in range(len(envs)) if not _stream_ends_done(buffer, i)]
    bootstraps = {i: np.zeros(n_sig) for i in range(len(envs))}
    if need:
        batch_obs = np.stack([pending[i][0] for i in need])
        batch_masks = [
            np.stack([getattr(pending[i][1], name) for i in need]).astype(np.float32)
            for name in ("action_type", "tile", "target")
        ]
        fwd = policy_forward(params, batch_obs, batch_masks)
        for j, i in enumerate(need):
            bootstraps[i] = fwd.values[j].astype(np.float64)

    buffer.advantages = np.zeros((size, n_sig), dtype=np.float64)
    buffer.returns = np.zeros((size, n_sig), dtype=np.float64)
    for i in range(len(envs)):
        idx = np.nonzero(buffer.env_ids == i)[0]
        if idx.size == 0:
            continue
        adv, ret = compute_gae(
            buffer.rewards[idx],
            buffer.values[idx],
            buffer.dones[idx],
            bootstraps[i],
            gammas,
            tcfg.gae_lambda,
        )
        buffer.advantages[idx] = adv
        buffer.returns[idx] = ret


def _stream_ends_done(buffer: RolloutBuffer, env_id: int) -> bool:
    idx = np.nonzero(buffer.env_ids == env_id)[0]
    return bool(idx.size and buffer.dones[idx[-1]])
