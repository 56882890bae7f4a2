"""Scikit-learn style front end for training and inpainting."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..imaging import Mask
from ..room_sim import RirMatrix
from ..validation import check_mask, check_patches, check_rir_array
from .checkpoint import load_checkpoint, save_checkpoint
from .model import DenoiserConfig
from .repaint import inpaint_matrix
from .schedule import NoiseSchedule
from .training import DenoiserParams, train


class DiffusionInpainter(BaseEstimator):
    """Learn a patch prior with ``fit`` and fill missing microphone columns with ``transform``.

    Parameters
    ----------
    n_steps, beta_start, beta_end : diffusion schedule.
    base_channels, depth, time_embedding_dim : denoiser size.
    n_epochs, batch_size, learning_rate, ema_decay, flip_augment : training.
    jump_length, n_resamples : RePaint resampling.
    random_state : int
        Seeds both training and sampling.
    """

    def __init__(self, n_steps=1000, beta_start=1e-4, beta_end=0.02, base_channels=32, depth=3,
                 time_embedding_dim=64, n_epochs=100, batch_size=16, learning_rate=2e-4,
                 ema_decay=0.999, flip_augment=True, jump_length=10, n_resamples=10, random_state=0):
        self.n_steps = n_steps
        self.beta_start = beta_start
        self.beta_end = beta_end
        self.base_channels = base_channels
        self.depth = depth
        self.time_embedding_dim = time_embedding_dim
        self.n_epochs = n_epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.ema_decay = ema_decay
        self.flip_augment = flip_augment
        self.jump_length = jump_length
        self.n_resamples = n_resamples
        self.random_state = random_state

    def fit(self, X, y=None):
        """Train on patches ``X`` of shape ``(n, 64, 64)`` with values in [-1, 1]."""
        X = check_patches(X)
        self.schedule_ = NoiseSchedule(self.n_steps, self.beta_start, self.beta_end)
        config = DenoiserConfig(self.base_channels, self.depth, self.time_embedding_dim)
        self.params_ = train(X, config, self.schedule_, epochs=self.n_epochs, batch_size=self.batch_size,
                             lr=self.learning_rate, ema_decay=self.ema_decay, seed=self.random_state,
                             flip_augment=self.flip_augment)
        self.loss_curve_ = list(self.params_.metadata["loss_history"])
        return self

    def inpaint(self, matrix: RirMatrix, mask: Mask, seed=None) -> RirMatrix:
        check_is_fitted(self, "params_")
        check_mask(mask, matrix.n_mics)
        return inpaint_matrix(self.params_, self.schedule_, matrix, mask, jump_length=self.jump_length,
                              n_resamples=self.n_resamples,
                              seed=self.random_state if seed is None else seed)

    def transform(self, X, mask: Mask, seed=None) -> np.ndarray:
        image = check_rir_array(X)
        return self.inpaint(RirMatrix(image, 1.0), mask, seed).data

    def save(self, path):
        check_is_fitted(self, "params_")
        meta = dict(self.params_.metadata, jump_length=self.jump_length, n_resamples=self.n_resamples)
        params = DenoiserParams(self.params_.config, self.params_.state, meta)
        return save_checkpoint(path, params, self.schedule_)

    @classmethod
    def load(cls, path, **overrides) -> "DiffusionInpainter":
        params, schedule = load_checkpoint(path)
        meta = params.metadata
        kw = dict(n_steps=schedule.n_steps, beta_start=schedule.beta_start, beta_end=schedule.beta_end,
                  base_channels=params.config.base_channels, depth=params.config.depth,
                  time_embedding_dim=params.config.time_embedding_dim,
                  n_epochs=meta.get("epochs", 0), batch_size=meta.get("batch_size", 16),
                  learning_rate=meta.get("lr", 2e-4), ema_decay=meta.get("ema_decay", 0.0),
                  flip_augment=meta.get("flip_augment", True), random_state=meta.get("seed", 0),
                  jump_length=meta.get("jump_length", 10), n_resamples=meta.get("n_resamples", 10))
        kw.update(overrides)
        est = cls(**kw)
        est.params_, est.schedule_ = params, schedule
        est.loss_curve_ = list(meta.get("loss_history", []))
        return est
