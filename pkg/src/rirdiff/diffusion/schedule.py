"""Linear DDPM noise schedule and the closed-form forward process."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseSchedule:
    """Linear beta schedule over steps ``t = 1..T``.

    Arrays are indexed by ``t - 1``. ``alpha_bar_prev[t - 1]`` is the cumulative
    product up to step ``t - 1`` (1 at ``t = 1``).
    """

    n_steps: int = 1000
    beta_start: float = 1e-4
    beta_end: float = 0.02

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("schedule needs at least one step")
        if not 0 < self.beta_start < 1 or not 0 < self.beta_end < 1:
            raise ValueError("beta endpoints must lie in (0, 1)")
        if self.n_steps > 1 and not self.beta_start < self.beta_end:
            raise ValueError("beta must increase along the schedule")

    @property
    def beta(self) -> np.ndarray:
        return np.linspace(self.beta_start, self.beta_end, self.n_steps, dtype=np.float64)

    @property
    def alpha(self) -> np.ndarray:
        return 1.0 - self.beta

    @property
    def alpha_bar(self) -> np.ndarray:
        return np.cumprod(self.alpha)

    @property
    def alpha_bar_prev(self) -> np.ndarray:
        return np.concatenate([[1.0], self.alpha_bar[:-1]])

    @property
    def posterior_variance(self) -> np.ndarray:
        return self.beta * (1.0 - self.alpha_bar_prev) / (1.0 - self.alpha_bar)

    def check_step(self, t):
        t_arr = np.asarray(t)
        if np.any(t_arr < 1) or np.any(t_arr > self.n_steps):
            raise ValueError(f"step must lie in [1, {self.n_steps}], got {t}")

    def to_dict(self) -> dict:
        return {"n_steps": self.n_steps, "beta_start": self.beta_start, "beta_end": self.beta_end}

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSchedule":
        return cls(int(d["n_steps"]), float(d["beta_start"]), float(d["beta_end"]))


def forward_sample(schedule: NoiseSchedule, x0, t: int, noise):
    """Draw ``x_t`` given ``x0`` and a standard-normal ``noise`` draw."""
    schedule.check_step(t)
    ab = schedule.alpha_bar[int(t) - 1]
    return np.sqrt(ab) * np.asarray(x0) + np.sqrt(1.0 - ab) * np.asarray(noise)


def repaint_levels(n_steps: int, jump_length: int, n_resamples: int) -> list[int]:
    """Sequence of noise levels visited by RePaint, from ``n_steps`` down to 0.

    Consecutive decreasing levels are denoising steps; increasing ones re-noise.
    Every ``jump_length`` steps the sampler jumps back ``jump_length`` levels,
    ``n_resamples - 1`` times.
    """
    if jump_length < 1 or n_resamples < 1:
        raise ValueError("jump_length and n_resamples must be positive")
    jumps = {j: n_resamples - 1 for j in range(0, n_steps - jump_length, jump_length)}
    # Walk zero-based model indices; level = index + 1.
    t = n_steps
    levels = []
    while t >= 1:
        t -= 1
        levels.append(t)
        if jumps.get(t, 0) > 0:
            jumps[t] -= 1
            for _ in range(jump_length):
                t += 1
                levels.append(t)
    return [i + 1 for i in levels] + [0]
