"""Networks, losses, optimizer, and checkpointing for the trainer."""

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint, verify_manifest_hashes
from .losses import (
    LOSS_SPECS,
    NumericError,
    bc_grads,
    disc_bce_grads,
    disc_bce_loss,
    gradients,
    ppo_combined,
)
from .nets import (
    DiscArch,
    DiscForward,
    MASK_NEG,
    Params,
    PolicyArch,
    PolicyForward,
    SIGMOID_EPS,
    cast_params,
    disc_backward,
    disc_forward,
    init_disc_params,
    init_policy_params,
    masked_log_softmax,
    policy_backward,
    policy_forward,
)
from .optim import Adam

__all__ = [
    "Adam",
    "CheckpointError",
    "DiscArch",
    "DiscForward",
    "LOSS_SPECS",
    "MASK_NEG",
    "NumericError",
    "Params",
    "PolicyArch",
    "PolicyForward",
    "SIGMOID_EPS",
    "bc_grads",
    "cast_params",
    "disc_backward",
    "disc_bce_grads",
    "disc_bce_loss",
    "disc_forward",
    "gradients",
    "init_disc_params",
    "init_policy_params",
    "load_checkpoint",
    "masked_log_softmax",
    "policy_backward",
    "policy_forward",
    "ppo_combined",
    "save_checkpoint",
    "verify_manifest_hashes",
]
