"""Noise-prediction training loop and the trained-parameter container."""

from __future__ import annotations

import copy
import hashlib
import logging
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
import torch

from ..validation import check_patches
from .model import Denoiser, DenoiserConfig
from .schedule import NoiseSchedule

logger = logging.getLogger(__name__)


class TrainingDivergedError(FloatingPointError):
    pass


def dataset_fingerprint(patches) -> str:
    arr = np.ascontiguousarray(np.asarray(patches, dtype="<f4"))
    h = hashlib.sha256()
    h.update(str(arr.shape).encode())
    h.update(arr.tobytes())
    return h.hexdigest()[:16]


@dataclass
class DenoiserParams:
    """Trained weights plus the configuration needed to rebuild the network."""

    config: DenoiserConfig
    state: "OrderedDict[str, torch.Tensor]"
    metadata: dict = field(default_factory=dict)

    def build_model(self) -> Denoiser:
        model = Denoiser(self.config)
        model.load_state_dict(self.state)
        model.eval()
        return model


def _seeded_model(config: DenoiserConfig, seed: int) -> Denoiser:
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return Denoiser(config)


def train(patches, config: DenoiserConfig = DenoiserConfig(), schedule: NoiseSchedule = NoiseSchedule(), *,
          epochs: int = 100, batch_size: int = 16, lr: float = 2e-4, ema_decay: float = 0.999,
          seed: int = 0, flip_augment: bool = True, log_every: int = 10) -> DenoiserParams:
    """Fit a denoiser by regressing the injected noise at uniformly drawn steps.

    Returns the exponential moving average of the weights when ``ema_decay > 0``.
    ``flip_augment`` mirrors patches along the microphone axis at random.
    The per-epoch mean loss is stored in ``metadata["loss_history"]``.
    """
    data = torch.from_numpy(check_patches(patches))[:, None]
    n = data.shape[0]
    gen = torch.Generator().manual_seed(int(seed))
    model = _seeded_model(config, int(seed))
    ema = copy.deepcopy(model) if ema_decay > 0 else None
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    ab = torch.as_tensor(schedule.alpha_bar, dtype=torch.float32)

    history = []
    model.train()
    for epoch in range(epochs):
        perm = torch.randperm(n, generator=gen)
        total, count = 0.0, 0
        for start in range(0, n, batch_size):
            x0 = data[perm[start:start + batch_size]]
            b = x0.shape[0]
            if flip_augment:
                flip = torch.rand(b, generator=gen) < 0.5
                x0 = torch.where(flip[:, None, None, None], x0.flip(-1), x0)
            t = torch.randint(1, schedule.n_steps + 1, (b,), generator=gen)
            noise = torch.randn(x0.shape, generator=gen)
            a = ab[t - 1][:, None, None, None]
            xt = a.sqrt() * x0 + (1 - a).sqrt() * noise
            loss = torch.mean((model(xt, t) - noise) ** 2)
            if not torch.isfinite(loss):
                raise TrainingDivergedError(
                    f"loss became {loss.item()} at epoch {epoch}, batch starting {start}; "
                    f"try a lower learning rate (now {lr})")
            opt.zero_grad()
            loss.backward()
            opt.step()
            if ema is not None:
                with torch.no_grad():
                    for pe, pm in zip(ema.parameters(), model.parameters()):
                        pe.mul_(ema_decay).add_(pm, alpha=1 - ema_decay)
            total += loss.item() * b
            count += b
        history.append(total / count)
        if log_every and (epoch % log_every == 0 or epoch == epochs - 1):
            logger.info("epoch %d/%d loss %.5f", epoch + 1, epochs, history[-1])

    final = ema if ema is not None else model
    state = OrderedDict((k, v.detach().clone()) for k, v in final.state_dict().items())
    meta = {
        "epochs": epochs, "lr": lr, "batch_size": batch_size, "ema_decay": ema_decay,
        "seed": int(seed), "flip_augment": flip_augment, "n_patches": n,
        "dataset_fingerprint": dataset_fingerprint(patches), "loss_history": history,
    }
    return DenoiserParams(config, state, meta)


def noise_prediction_loss(model: Denoiser, schedule: NoiseSchedule, x0: torch.Tensor, t: torch.Tensor,
                          noise: torch.Tensor) -> torch.Tensor:
    """Training objective for fixed draws; used for gradient checks."""
    ab = torch.as_tensor(schedule.alpha_bar, dtype=x0.dtype)[t - 1][:, None, None, None]
    xt = ab.sqrt() * x0 + (1 - ab).sqrt() * noise
    return torch.mean((model(xt, t) - noise) ** 2)
