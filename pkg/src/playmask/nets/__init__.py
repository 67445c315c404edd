from .adam import AdamState, adam_step
from .checkpoint import load_checkpoint, save_checkpoint
from .dense import (
    DenseNet,
    Gradients,
    finite_diff_check,
    forward,
    forward_batch,
    nll_batch_loss_and_grad,
    nll_loss_and_grad,
    td_batch_loss_and_grad,
    td_loss_and_grad,
)

__all__ = [
    "AdamState",
    "DenseNet",
    "Gradients",
    "adam_step",
    "finite_diff_check",
    "forward",
    "forward_batch",
    "load_checkpoint",
    "nll_batch_loss_and_grad",
    "nll_loss_and_grad",
    "save_checkpoint",
    "td_batch_loss_and_grad",
    "td_loss_and_grad",
]
