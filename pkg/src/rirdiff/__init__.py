"""Diffusion-model inpainting of room impulse responses on microphone arrays."""

from .baseline import SplineInterpolator, sci_interpolate
from .diffusion import DiffusionInpainter, NoiseSchedule
from .imaging import Mask, make_mask, reassemble, split_patches
from .metrics import cosine_distance, evaluate, nmse
from .room_sim import ArrayGeometry, RirMatrix, RoomSpec, make_arc_array, simulate_matrix, simulate_rir

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry", "DiffusionInpainter", "Mask", "NoiseSchedule", "RirMatrix", "RoomSpec",
    "SplineInterpolator", "cosine_distance", "evaluate", "make_arc_array", "make_mask", "nmse",
    "reassemble", "sci_interpolate", "simulate_matrix", "simulate_rir", "split_patches",
]
