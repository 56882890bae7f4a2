from .checkpoint import load_checkpoint, save_checkpoint
from .estimator import DiffusionInpainter
from .model import Denoiser, DenoiserConfig
from .repaint import inpaint_matrix, repaint_inpaint
from .schedule import NoiseSchedule, forward_sample, repaint_levels
from .training import DenoiserParams, TrainingDivergedError, dataset_fingerprint, train

__all__ = [
    "Denoiser", "DenoiserConfig", "DenoiserParams", "DiffusionInpainter", "NoiseSchedule",
    "TrainingDivergedError", "dataset_fingerprint", "forward_sample", "inpaint_matrix",
    "load_checkpoint", "repaint_inpaint", "repaint_levels", "save_checkpoint", "train",
]
