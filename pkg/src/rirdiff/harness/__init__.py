from .config import PROFILES, ExperimentConfig
from .dataset import TrainingSet, build_training_set, simulate_scene
from .experiment import Cell, ExperimentResult, grid_cells, read_rows, run_cell, run_experiment, summarize
from .io import export_rir_image, read_rir_image, read_rirb, write_rirb

__all__ = [
    "PROFILES", "Cell", "ExperimentConfig", "ExperimentResult", "TrainingSet", "build_training_set",
    "export_rir_image", "grid_cells", "read_rir_image", "read_rirb", "read_rows", "run_cell",
    "run_experiment", "simulate_scene", "summarize", "write_rirb",
]
