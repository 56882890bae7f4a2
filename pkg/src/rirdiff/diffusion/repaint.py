"""Mask-conditioned sampling (RePaint) and whole-matrix inpainting."""

from __future__ import annotations

import numpy as np
import torch

from ..imaging import Mask, complete_matrix, reassemble, split_patches
from ..room_sim import RirMatrix
from .model import Denoiser
from .schedule import NoiseSchedule, repaint_levels
from .training import DenoiserParams


def patch_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, dtype=np.uint64)[0] >> 1)


class _Streams:
    """One torch generator per patch, so draws do not depend on batch composition."""

    def __init__(self, seed: int, ids):
        self.gens = [torch.Generator().manual_seed(patch_seed(seed, i)) for i in ids]

    def randn(self, shape) -> torch.Tensor:
        return torch.stack([torch.randn(shape, generator=g) for g in self.gens])


def _as_model(params) -> Denoiser:
    if isinstance(params, DenoiserParams):
        return params.build_model()
    params.eval()
    return params


@torch.no_grad()
def repaint_inpaint(params, schedule: NoiseSchedule, masked_patch, pixel_mask, jump_length: int = 10,
                    n_resamples: int = 10, seed: int = 0, *, patch_ids=None) -> np.ndarray:
    """Fill the unknown pixels of one or more patches.

    ``masked_patch`` is ``(H, W)`` or ``(B, H, W)`` with known values in [-1, 1];
    ``pixel_mask`` is True on known pixels. Known pixels of the result equal the
    input exactly; everything is clipped to [-1, 1].
    """
    x0 = np.asarray(masked_patch, dtype=np.float32)
    known = np.asarray(pixel_mask, dtype=bool)
    single = x0.ndim == 2
    if single:
        x0, known = x0[None], known[None]
    if known.shape != x0.shape:
        raise ValueError(f"mask shape {known.shape} does not match patch shape {x0.shape}")
    if jump_length < 1 or n_resamples < 1:
        raise ValueError("jump_length and n_resamples must be positive")
    ids = np.arange(x0.shape[0]) if patch_ids is None else np.asarray(patch_ids)
    if len(ids) != x0.shape[0]:
        raise ValueError("patch_ids must have one entry per patch")

    result = np.clip(np.where(known, x0, 0.0), -1.0, 1.0).astype(np.float32)
    todo = np.flatnonzero(~known.reshape(len(x0), -1).all(axis=1))
    if todo.size:
        model = _as_model(params)
        filled = _sample(model, schedule, torch.from_numpy(x0[todo])[:, None],
                         torch.from_numpy(known[todo])[:, None], jump_length, n_resamples,
                         _Streams(seed, ids[todo]))
        result[todo] = filled[:, 0].numpy()
    result = np.where(known, x0, result).astype(np.float32)
    return result[0] if single else result


def _sample(model, schedule, x0, known, jump_length, n_resamples, streams) -> torch.Tensor:
    beta = torch.as_tensor(schedule.beta, dtype=torch.float32)
    alpha = 1.0 - beta
    ab = torch.as_tensor(schedule.alpha_bar, dtype=torch.float32)
    ab_prev = torch.as_tensor(schedule.alpha_bar_prev, dtype=torch.float32)
    post_var = torch.as_tensor(schedule.posterior_variance, dtype=torch.float32)
    coef_x0 = beta * ab_prev.sqrt() / (1.0 - ab)
    coef_xt = (1.0 - ab_prev) * alpha.sqrt() / (1.0 - ab)
    m = known.to(torch.float32)
    shape = tuple(x0.shape[1:])
    b = x0.shape[0]

    levels = repaint_levels(schedule.n_steps, jump_length, n_resamples)
    x = streams.randn(shape)
    for cur, nxt in zip(levels[:-1], levels[1:]):
        if nxt < cur:
            i = cur - 1
            t = torch.full((b,), cur, dtype=torch.long)
            eps = model(x, t)
            x0_hat = ((x - (1 - ab[i]).sqrt() * eps) / ab[i].sqrt()).clamp(-1.0, 1.0)
            mean = coef_x0[i] * x0_hat + coef_xt[i] * x
            if nxt > 0:
                unknown = mean + post_var[i].sqrt() * streams.randn(shape)
                known_part = ab_prev[i].sqrt() * x0 + (1 - ab_prev[i]).sqrt() * streams.randn(shape)
            else:
                unknown = mean
                known_part = x0
            x = m * known_part + (1 - m) * unknown
        else:
            i = nxt - 1
            x = alpha[i].sqrt() * x + beta[i].sqrt() * streams.randn(shape)
    return x.clamp(-1.0, 1.0)


def inpaint_matrix(params, schedule: NoiseSchedule, matrix: RirMatrix, mask: Mask, *,
                   jump_length: int = 10, n_resamples: int = 10, seed: int = 0,
                   batch_size: int = 64) -> RirMatrix:
    """Split into patches, inpaint each with RePaint, reassemble and keep measured columns."""
    if mask.n_mics != matrix.n_mics:
        raise ValueError("mask length does not match the number of microphones")
    if mask.n_missing == 0:
        return matrix.with_data(matrix.data.copy())
    grid = split_patches(matrix, mask)
    pmask = grid.pixel_masks()
    model = _as_model(params)
    filled = np.empty_like(grid.pixels)
    for start in range(0, grid.n_patches, batch_size):
        sl = slice(start, start + batch_size)
        ids = np.arange(grid.n_patches)[sl]
        filled[sl] = repaint_inpaint(model, schedule, grid.pixels[sl], pmask[sl], jump_length,
                                     n_resamples, seed, patch_ids=ids)
    image = reassemble(grid, filled)
    out = complete_matrix(matrix, mask, image)
    out.meta = dict(out.meta, method="diffusion")
    return out
