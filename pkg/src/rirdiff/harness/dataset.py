"""Training patches drawn from simulated low-reverberation RIR images."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..diffusion.training import dataset_fingerprint
from ..imaging import split_patches
from ..room_sim import RirMatrix, RoomSpec, make_arc_array, reflection_coeff_for_t60, simulate_matrix, source_at_angle
from .config import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass
class TrainingSet:
    patches: np.ndarray
    fingerprint: str
    realization: list = field(default_factory=list)

    def __len__(self):
        return len(self.patches)


def simulate_scene(config: ExperimentConfig, curvature: float, angle: float, t60: float,
                   n_samples: int) -> RirMatrix:
    return _simulate_cached(tuple(config.room_dims), config.speed_of_sound, config.sample_rate,
                            config.n_mics, float(curvature), float(angle), float(t60), int(n_samples))


@lru_cache(maxsize=32)
def _simulate_cached(dims, c, fs, n_mics, curvature, angle, t60, n_samples):
    base = RoomSpec(dims, 0.0, c, fs)
    beta = reflection_coeff_for_t60(base, t60)
    room = base.with_reflection(beta)
    array = make_arc_array(n_mics, curvature, room)
    source = source_at_angle(room, array, angle)
    M = simulate_matrix(room, source, array, n_samples)
    M.meta.update({"beta": beta, "t60_target": t60})
    M.data.setflags(write=False)
    return M


def build_training_set(config: ExperimentConfig, seed: int) -> TrainingSet:
    """Simulate ``n_train_images`` RIR images and crop ``n_train_patches`` normalized patches.

    Each image uses a curvature and source angle drawn uniformly from the
    training lists. Crop offsets are uniform over all valid time positions,
    so the dataset can exceed the number of grid-aligned tiles.
    """
    rng = np.random.default_rng(seed)
    images, realization = [], []
    for i in range(config.n_train_images):
        curv = float(rng.choice(config.train_curvatures))
        ang = float(rng.choice(config.train_angles))
        logger.info("training image %d: curvature %.3f, angle %.0f", i, curv, ang)
        images.append(simulate_scene(config, curv, ang, config.t60_train, config.k_train).data)
        realization.append({"curvature": curv, "angle_deg": ang})

    size = 64
    patches = np.empty((config.n_train_patches, size, size))
    for p in range(config.n_train_patches):
        img = images[rng.integers(len(images))]
        K, N = img.shape
        r = int(rng.integers(0, max(K - size, 0) + 1))
        c = int(rng.integers(0, max(N - size, 0) + 1))
        grid = split_patches(img[r:r + size, c:c + size])
        patches[p] = grid.pixels[0]
        realization.append({"patch": p, "row": r, "col": c})
    return TrainingSet(patches, dataset_fingerprint(patches), realization)
