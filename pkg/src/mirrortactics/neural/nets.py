"""Feed-forward policy and discriminator with hand-written backprop.

Parameters are plain dicts of numpy arrays so checkpoints, the optimizer,
and the finite-difference checks all see one flat representation. Row-vector
convention throughout: ``y = x @ W + b`` with ``W`` shaped (in, out).

Masking adds a large negative constant to excluded logits before the
softmax; excluded entries end up with exactly zero probability and therefore
exactly zero gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK_NEG = 1e9
SIGMOID_EPS = 1e-7

Params = dict[str, np.ndarray]


@dataclass(frozen=True)
class PolicyArch:
    obs_size: int = 136
    hidden: int = 256
    branch_sizes: tuple[int, ...] = (3, 48, 4)
    n_signals: int = 1

    def to_json(self) -> dict:
        return {
            "obs_size": self.obs_size,
            "hidden": self.hidden,
            "branch_sizes": list(self.branch_sizes),
            "n_signals": self.n_signals,
        }

    @staticmethod
    def from_json(obj: dict) -> "PolicyArch":
        return PolicyArch(
            obs_size=int(obj["obs_size"]),
            hidden=int(obj["hidden"]),
            branch_sizes=tuple(int(b) for b in obj["branch_sizes"]),
            n_signals=int(obj["n_signals"]),
        )


@dataclass(frozen=True)
class DiscArch:
    obs_size: int = 136
    action_size: int = 55
    hidden: int = 64

    def to_json(self) -> dict:
        return {"obs_size": self.obs_size, "action_size": self.action_size, "hidden": self.hidden}

    @staticmethod
    def from_json(obj: dict) -> "DiscArch":
        return DiscArch(
            obs_size=int(obj["obs_size"]),
            action_size=int(obj["action_size"]),
            hidden=int(obj["hidden"]),
        )


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(np.float32)


def init_policy_params(arch: PolicyArch, seed: int) -> Params:
    if arch.obs_size <= 0 or arch.hidden <= 0 or arch.n_signals <= 0:
        raise ValueError("policy dims must be positive")
    rng = np.random.default_rng(seed)
    h = arch.hidden
    params: Params = {
        "trunk.w0": _glorot(rng, arch.obs_size, h),
        "trunk.b0": np.zeros(h, dtype=np.float32),
        "trunk.w1": _glorot(rng, h, h),
        "trunk.b1": np.zeros(h, dtype=np.float32),
    }
    for name, size in zip(("type", "tile", "target"), arch.branch_sizes):
        params[f"head.{name}.w"] = _glorot(rng, h, size)
        params[f"head.{name}.b"] = np.zeros(size, dtype=np.float32)
    params["value.w"] = _glorot(rng, h, arch.n_signals)
    params["value.b"] = np.zeros(arch.n_signals, dtype=np.float32)
    return params


def init_disc_params(arch: DiscArch, seed: int) -> Params:
    if arch.obs_size <= 0 or arch.action_size <= 0 or arch.hidden <= 0:
        raise ValueError("discriminator dims must be positive")
    rng = np.random.default_rng(seed)
    n_in = arch.obs_size + arch.action_size
    return {
        "disc.w0": _glorot(rng, n_in, arch.hidden),
        "disc.b0": np.zeros(arch.hidden, dtype=np.float32),
        "disc.w1": _glorot(rng, arch.hidden, 1),
        "disc.b1": np.zeros(1, dtype=np.float32),
    }


def masked_log_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Log-probabilities with masked entries forced to (near) zero mass."""
    shifted = logits - MASK_NEG * (1.0 - mask)
    m = shifted.max(axis=-1, keepdims=True)
    stable = shifted - m
    lse = np.log(np.exp(stable).sum(axis=-1, keepdims=True))
    return stable - lse


@dataclass
class PolicyForward:
    log_probs: list[np.ndarray]  # per branch, (N, K)
    values: np.ndarray  # (N, S)
    # cache for backward
    x: np.ndarray
    z1: np.ndarray
    a1: np.ndarray
    z2: np.ndarray
    a2: np.ndarray

    @property
    def probs(self) -> list[np.ndarray]:
        return [np.exp(lp) for lp in self.log_probs]

    def joint_log_prob(self, actions: np.ndarray) -> np.ndarray:
        """Sum of branch log-probs for (N, 3) integer actions."""
        idx = np.arange(actions.shape[0])
        return sum(self.log_probs[b][idx, actions[:, b]] for b in range(len(self.log_probs)))

    def entropy(self) -> np.ndarray:
        """Per-sample sum of branch entropies (masked entries contribute 0)."""
        total = None
        for lp in self.log_probs:
            p = np.exp(lp)
            h = -(p * np.where(p > 0, lp, 0.0)).sum(axis=-1)
            total = h if total is None else total + h
        return total


def policy_forward(params: Params, obs: np.ndarray, masks: list[np.ndarray]) -> PolicyForward:
    x = np.atleast_2d(obs)
    if x.shape[1] != params["trunk.w0"].shape[0]:
        raise ValueError(f"observation width {x.shape[1]} does not match network input")
    z1 = x @ params["trunk.w0"] + params["trunk.b0"]
    a1 = np.maximum(z1, 0.0)
    z2 = a1 @ params["trunk.w1"] + params["trunk.b1"]
    a2 = np.maximum(z2, 0.0)
    log_probs = []
    for name, mask in zip(("type", "tile", "target"), masks):
        mask2d = np.atleast_2d(mask)
        if not np.all(mask2d.sum(axis=-1) >= 1):
            raise ValueError(f"all-masked {name} branch violates the mask contract")
        logits = a2 @ params[f"head.{name}.w"] + params[f"head.{name}.b"]
        log_probs.append(masked_log_softmax(logits, mask2d.astype(logits.dtype)))
    values = a2 @ params["value.w"] + params["value.b"]
    return PolicyForward(log_probs=log_probs, values=values, x=x, z1=z1, a1=a1, z2=z2, a2=a2)


def policy_backward(
    params: Params,
    fwd: PolicyForward,
    d_logits: list[np.ndarray] | None,
    d_values: np.ndarray | None,
) -> Params:
    """Backprop head/value gradients through the shared trunk.

    ``d_logits`` are gradients w.r.t. each branch's raw logits; masked
    entries must already be zero (they are whenever the gradient is built
    from masked probabilities).
    """
    grads: Params = {}
    d_a2 = np.zeros_like(fwd.a2)
    if d_logits is not None:
        for name, dz in zip(("type", "tile", "target"), d_logits):
            grads[f"head.{name}.w"] = fwd.a2.T @ dz
            grads[f"head.{name}.b"] = dz.sum(axis=0)
            d_a2 += dz @ params[f"head.{name}.w"].T
    else:
        for name, size in zip(("type", "tile", "target"), (3, 48, 4)):
            grads[f"head.{name}.w"] = np.zeros_like(params[f"head.{name}.w"])
            grads[f"head.{name}.b"] = np.zeros_like(params[f"head.{name}.b"])
    if d_values is not None:
        grads["value.w"] = fwd.a2.T @ d_values
        grads["value.b"] = d_values.sum(axis=0)
        d_a2 += d_values @ params["value.w"].T
    else:
        grads["value.w"] = np.zeros_like(params["value.w"])
        grads["value.b"] = np.zeros_like(params["value.b"])

    d_z2 = d_a2 * (fwd.z2 > 0)
    grads["trunk.w1"] = fwd.a1.T @ d_z2
    grads["trunk.b1"] = d_z2.sum(axis=0)
    d_a1 = d_z2 @ params["trunk.w1"].T
    d_z1 = d_a1 * (fwd.z1 > 0)
    grads["trunk.w0"] = fwd.x.T @ d_z1
    grads["trunk.b0"] = d_z1.sum(axis=0)
    return grads


@dataclass
class DiscForward:
    d: np.ndarray  # (N,), clamped to (eps, 1-eps)
    logit: np.ndarray  # (N,)
    x: np.ndarray
    z1: np.ndarray
    a1: np.ndarray


def disc_forward(params: Params, obs: np.ndarray, action_onehot: np.ndarray) -> DiscForward:
    obs = np.atleast_2d(obs)
    action_onehot = np.atleast_2d(action_onehot)
    if obs.shape[0] != action_onehot.shape[0]:
        raise ValueError("observation/action batch sizes differ")
    x = np.concatenate([obs, action_onehot], axis=1)
    if x.shape[1] != params["disc.w0"].shape[0]:
        raise ValueError(f"discriminator input width {x.shape[1]} does not match network")
    z1 = x @ params["disc.w0"] + params["disc.b0"]
    a1 = np.maximum(z1, 0.0)
    logit = (a1 @ params["disc.w1"] + params["disc.b1"]).reshape(-1)
    d = 1.0 / (1.0 + np.exp(-logit))
    d = np.clip(d, SIGMOID_EPS, 1.0 - SIGMOID_EPS)
    return DiscForward(d=d, logit=logit, x=x, z1=z1, a1=a1)


def disc_backward(params: Params, fwd: DiscForward, d_logit: np.ndarray) -> Params:
    dz = d_logit.reshape(-1, 1)
    grads: Params = {
        "disc.w1": fwd.a1.T @ dz,
        "disc.b1": dz.sum(axis=0),
    }
    d_a1 = dz @ params["disc.w1"].T
    d_z1 = d_a1 * (fwd.z1 > 0)
    grads["disc.w0"] = fwd.x.T @ d_z1
    grads["disc.b0"] = d_z1.sum(axis=0)
    return grads


def cast_params(params: Params, dtype) -> Params:
    return {k: v.astype(dtype) for k, v in params.items()}
