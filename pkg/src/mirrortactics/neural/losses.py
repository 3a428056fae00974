"""The five training loss terms with exact analytic gradients.

``gradients(loss_spec, params, batch)`` is the uniform entry point checked
against central finite differences; each term is also available through a
combined single-pass path used by the trainer (it shares one forward and
sums head gradients, which is identical by linearity).
"""

from __future__ import annotations

import numpy as np

from .nets import DiscForward, Params, PolicyForward, disc_backward, disc_forward, policy_backward, policy_forward

LOSS_SPECS = ("ppo_policy", "value_mse", "bc_ce", "gail_bce", "entropy")


class NumericError(Exception):
    """Non-finite value in a loss or gradient; carries the tensor name."""


def _check_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"non-finite values in {name}")


def _onehot_rows(idx: np.ndarray, width: int, dtype) -> np.ndarray:
    out = np.zeros((idx.shape[0], width), dtype=dtype)
    out[np.arange(idx.shape[0]), idx] = 1.0
    return out


# -- per-term head gradients ---------------------------------------------------
# Each helper returns (loss, d_logits or d_values) given a shared forward.


def _surrogate_terms(fwd: PolicyForward, actions, old_logp, advantages, clip_eps):
    logp = fwd.joint_log_prob(actions)
    ratio = np.exp(logp - old_logp)
    clipped = np.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps)
    candidate_a = ratio * advantages
    candidate_b = clipped * advantages
    loss = -np.minimum(candidate_a, candidate_b).mean()
    # gradient flows only where the unclipped branch attains the minimum
    active = (candidate_a <= candidate_b).astype(ratio.dtype)
    d_logp = -(advantages * ratio * active) / ratio.shape[0]
    return loss, d_logp


def _dlogits_from_dlogp(fwd: PolicyForward, actions: np.ndarray, d_logp: np.ndarray):
    """Chain d loss / d joint-logp through each branch's log-softmax."""
    d_logits = []
    n = actions.shape[0]
    rows = np.arange(n)
    for b, lp in enumerate(fwd.log_probs):
        p = np.exp(lp)
        onehot = _onehot_rows(actions[:, b], lp.shape[1], lp.dtype)
        d_logits.append(d_logp[:, None] * (onehot - p))
    return d_logits


def _entropy_terms(fwd: PolicyForward):
    total = fwd.entropy()
    loss = total.mean()
    n = total.shape[0]
    d_logits = []
    for lp in fwd.log_probs:
        p = np.exp(lp)
        h = -(p * np.where(p > 0, lp, 0.0)).sum(axis=-1, keepdims=True)
        # dH/dz = -p * (logp + H); masked entries have p = 0
        d_logits.append(np.where(p > 0, -p * (lp + h), 0.0) / n)
    return loss, d_logits


def _bc_terms(fwd: PolicyForward, actions: np.ndarray):
    # the target branch is only read for attacks, so only attack samples
    # contribute to (and receive gradient through) that branch
    n = actions.shape[0]
    rows = np.arange(n)
    attack_rows = (actions[:, 0] == 2).astype(fwd.log_probs[0].dtype)
    loss = 0.0
    d_logits = []
    for b, lp in enumerate(fwd.log_probs):
        weight = attack_rows if b == 2 else np.ones(n, dtype=lp.dtype)
        picked = lp[rows, actions[:, b]]
        loss -= (weight * picked).sum() / n
        p = np.exp(lp)
        onehot = _onehot_rows(actions[:, b], lp.shape[1], lp.dtype)
        d_logits.append(weight[:, None] * (p - onehot) / n)
    return loss, d_logits


def _value_terms(fwd: PolicyForward, returns: np.ndarray):
    diff = fwd.values - returns
    loss = (diff**2).mean()
    d_values = 2.0 * diff / diff.size
    return loss, d_values


def _gail_terms(fwd: DiscForward, labels: np.ndarray):
    # numerically stable BCE on the logit: softplus(z) - y*z
    z = fwd.logit
    loss = (np.logaddexp(0.0, z) - labels * z).mean()
    sig = 1.0 / (1.0 + np.exp(-z))
    d_logit = (sig - labels) / z.shape[0]
    return loss, d_logit


# -- uniform entry point -------------------------------------------------------


def gradients(loss_spec: str, params: Params, batch: dict) -> tuple[float, Params]:
    """Loss value and analytic parameter gradients for one loss term.

    ``batch`` keys by spec:
      ppo_policy: obs, masks, actions, old_logp, advantages, clip_eps
      value_mse:  obs, masks, returns
      bc_ce:      obs, masks, actions
      entropy:    obs, masks
      gail_bce:   obs, action_onehot, labels   (discriminator params)
    """
    if loss_spec == "gail_bce":
        fwd = disc_forward(params, batch["obs"], batch["action_onehot"])
        loss, d_logit = _gail_terms(fwd, np.asarray(batch["labels"]))
        grads = disc_backward(params, fwd, d_logit)
    elif loss_spec in LOSS_SPECS:
        fwd = policy_forward(params, batch["obs"], batch["masks"])
        if loss_spec == "ppo_policy":
            loss, d_logp = _surrogate_terms(
                fwd, batch["actions"], batch["old_logp"], batch["advantages"], batch["clip_eps"]
            )
            d_logits = _dlogits_from_dlogp(fwd, batch["actions"], d_logp)
            grads = policy_backward(params, fwd, d_logits, None)
        elif loss_spec == "value_mse":
            loss, d_values = _value_terms(fwd, batch["returns"])
            grads = policy_backward(params, fwd, None, d_values)
        elif loss_spec == "bc_ce":
            loss, d_logits = _bc_terms(fwd, batch["actions"])
            grads = policy_backward(params, fwd, d_logits, None)
        else:  # entropy
            loss, d_logits = _entropy_terms(fwd)
            grads = policy_backward(params, fwd, d_logits, None)
    else:
        raise ValueError(f"unknown loss spec {loss_spec!r}")

    for name, g in grads.items():
        _check_finite(name, g)
    if not np.isfinite(loss):
        raise NumericError(f"non-finite {loss_spec} loss")
    return float(loss), grads


# -- combined single-pass objectives ------------------------------------------


def ppo_combined(
    params: Params,
    batch: dict,
    clip_eps: float,
    value_coef: float,
    entropy_beta: float,
    policy_weight: float = 1.0,
) -> tuple[dict, Params]:
    """Clipped surrogate + value MSE - entropy bonus in one forward/backward.

    Returns the individual loss values (for logging) and the summed
    gradients. Identical to combining the separate ``gradients`` calls.
    """
    fwd = policy_forward(params, batch["obs"], batch["masks"])
    p_loss, d_logp = _surrogate_terms(
        fwd, batch["actions"], batch["old_logp"], batch["advantages"], clip_eps
    )
    d_logits = _dlogits_from_dlogp(fwd, batch["actions"], d_logp)
    v_loss, d_values = _value_terms(fwd, batch["returns"])
    e_loss, e_dlogits = _entropy_terms(fwd)

    total_dlogits = [
        policy_weight * dl + (-entropy_beta) * de for dl, de in zip(d_logits, e_dlogits)
    ]
    grads = policy_backward(params, fwd, total_dlogits, value_coef * d_values)
    losses = {"policy": p_loss, "value": v_loss, "entropy": e_loss}
    for name, g in grads.items():
        _check_finite(name, g)
    return losses, grads


def bc_grads(params: Params, obs: np.ndarray, masks: list[np.ndarray], actions: np.ndarray) -> tuple[float, Params]:
    fwd = policy_forward(params, obs, masks)
    loss, d_logits = _bc_terms(fwd, actions)
    grads = policy_backward(params, fwd, d_logits, None)
    return float(loss), grads


def disc_bce_grads(params: Params, obs: np.ndarray, action_onehot: np.ndarray, labels: np.ndarray) -> tuple[float, Params]:
    fwd = disc_forward(params, obs, action_onehot)
    loss, d_logit = _gail_terms(fwd, labels)
    grads = disc_backward(params, fwd, d_logit)
    return float(loss), grads


def disc_bce_loss(params: Params, obs: np.ndarray, action_onehot: np.ndarray, labels: np.ndarray) -> float:
    fwd = disc_forward(params, obs, action_onehot)
    z = fwd.logit
    return float((np.logaddexp(0.0, z) - labels * z).mean())
