"""Compact noise-prediction U-Net for single-channel 64x64 patches."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import torch
import torch.nn.functional as F
from torch import nn


@dataclass(frozen=True)
class DenoiserConfig:
    base_channels: int = 32
    depth: int = 3
    time_embedding_dim: int = 64

    def __post_init__(self):
        if self.base_channels < 1 or self.depth < 1 or self.time_embedding_dim < 2:
            raise ValueError(f"invalid denoiser config {self}")
        if self.time_embedding_dim % 2:
            raise ValueError("time_embedding_dim must be even")

    def channels(self, level: int) -> int:
        return self.base_channels * 2 ** min(level, 2)

    def to_dict(self) -> dict:
        return asdict(self)


def timestep_embedding(t: torch.Tensor, dim: int) -> torch.Tensor:
    half = dim // 2
    freqs = torch.exp(-math.log(10000.0) * torch.arange(half, dtype=torch.float64) / half)
    args = t.to(torch.float64)[:, None] * freqs[None, :]
    return torch.cat([torch.sin(args), torch.cos(args)], dim=1)


def _norm(ch: int) -> nn.GroupNorm:
    return nn.GroupNorm(math.gcd(8, ch), ch)


class ResBlock(nn.Module):
    def __init__(self, in_ch: int, out_ch: int, temb_dim: int):
        super().__init__()
        self.norm1 = _norm(in_ch)
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, padding=1)
        self.temb = nn.Linear(temb_dim, out_ch)
        self.norm2 = _norm(out_ch)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1)
        self.skip = nn.Conv2d(in_ch, out_ch, 1) if in_ch != out_ch else nn.Identity()

    def forward(self, x, temb):
        h = self.conv1(F.silu(self.norm1(x)))
        h = h + self.temb(temb)[:, :, None, None]
        h = self.conv2(F.silu(self.norm2(h)))
        return h + self.skip(x)


class Denoiser(nn.Module):
    """Encoder-decoder with skip connections predicting the injected noise.

    Input ``x`` has shape ``(B, 1, H, W)`` with ``H`` and ``W`` divisible by
    ``2 ** depth``; ``t`` holds integer steps of shape ``(B,)``.
    """

    def __init__(self, config: DenoiserConfig = DenoiserConfig()):
        super().__init__()
        self.config = config
        td = config.time_embedding_dim
        self.time_mlp = nn.Sequential(nn.Linear(td, td), nn.SiLU(), nn.Linear(td, td))
        self.inc = nn.Conv2d(1, config.channels(0), 3, padding=1)
        self.down = nn.ModuleList()
        ch = config.channels(0)
        skips = []
        for level in range(config.depth):
            out = config.channels(level)
            self.down.append(ResBlock(ch, out, td))
            skips.append(out)
            ch = out
        self.mid = ResBlock(ch, config.channels(config.depth), td)
        ch = config.channels(config.depth)
        self.up = nn.ModuleList()
        for level in reversed(range(config.depth)):
            out = config.channels(level)
            self.up.append(ResBlock(ch + skips[level], out, td))
            ch = out
        self.out_norm = _norm(ch)
        self.out = nn.Conv2d(ch, 1, 3, padding=1)

    def forward(self, x: torch.Tensor, t: torch.Tensor) -> torch.Tensor:
        temb = timestep_embedding(t, self.config.time_embedding_dim).to(x.dtype)
        temb = self.time_mlp(temb)
        h = self.inc(x)
        skips = []
        for block in self.down:
            h = block(h, temb)
            skips.append(h)
            h = F.avg_pool2d(h, 2)
        h = self.mid(h, temb)
        for block in self.up:
            h = F.interpolate(h, scale_factor=2, mode="nearest")
            h = block(torch.cat([h, skips.pop()], dim=1), temb)
        return self.out(F.silu(self.out_norm(h)))
