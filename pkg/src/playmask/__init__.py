"""Goal-conditioned Q-learning over discrete motion primitives, guided by a
behavioral prior learned from task-agnostic play data."""

__version__ = "0.1.0"
