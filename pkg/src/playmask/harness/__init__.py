from .config import ExperimentConfig, load_config, save_config
from .run import RunResult, aggregate_csv_path, run
from .sweeps import sweep_dataset_size, sweep_her, sweep_rho
from .svgplot import emit_plots

__all__ = [
    "ExperimentConfig",
    "RunResult",
    "aggregate_csv_path",
    "emit_plots",
    "load_config",
    "run",
    "save_config",
    "sweep_dataset_size",
    "sweep_her",
    "sweep_rho",
]
