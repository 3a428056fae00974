"""Generalized advantage estimation with one gamma per reward signal."""

from __future__ import annotations

import numpy as np


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    bootstrap: np.ndarray,
    gammas: np.ndarray,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-signal advantages and returns for one environment's step stream.

    ``rewards``/``values`` are (T, S); ``dones[t]`` means the episode ended
    at step t (no bootstrapping across it). ``bootstrap`` is the value of the
    state after the final step, used only when the stream ends mid-episode.
    Returns (advantages, returns), both (T, S).
    """
    t_len, n_signals = rewards.shape
    adv = np.zeros((t_len, n_signals), dtype=np.float64)
    next_adv = np.zeros(n_signals, dtype=np.float64)
    next_val = bootstrap.astype(np.float64).copy()
    for t in range(t_len - 1, -1, -1):
        nonterminal = 0.0 if dones[t] else 1.0
        delta = rewards[t] + gammas * next_val * nonterminal - values[t]
        next_adv = delta + gammas * lam * nonterminal * next_adv
        adv[t] = next_adv
        next_val = values[t]
    return adv, adv + values


def mix_and_normalize(per_signal_adv: np.ndarray, strengths: np.ndarray) -> np.ndarray:
    """Strength-weighted advantage sum, normalized to zero mean, unit variance."""
    mixed = per_signal_adv @ strengths
    std = mixed.std()
    return (mixed - mixed.mean()) / max(std, 1e-8)
