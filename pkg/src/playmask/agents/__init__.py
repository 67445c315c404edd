from .qlearn import (
    QEnsemble,
    act_elfp,
    act_soft_elfp,
    dqfd_loss,
    dqfd_step,
    masked_targets,
    td_step,
)
from .her import her_relabel
from .prefill import prefill
from .replay import ReplayBuffer, Transition
from .train import (
    ALGORITHMS,
    AgentConfig,
    MetricsRow,
    MetricsSeries,
    default_config,
    evaluate,
    train,
)

__all__ = [
    "ALGORITHMS",
    "AgentConfig",
    "MetricsRow",
    "MetricsSeries",
    "QEnsemble",
    "ReplayBuffer",
    "Transition",
    "act_elfp",
    "act_soft_elfp",
    "default_config",
    "dqfd_loss",
    "dqfd_step",
    "evaluate",
    "her_relabel",
    "masked_targets",
    "prefill",
    "td_step",
    "train",
]
