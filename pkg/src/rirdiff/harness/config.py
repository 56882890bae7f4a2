"""Experiment configuration: one JSON file, every field overridable."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..room_sim import DEFAULT_DIMS, SOURCE_ANGLES, RoomSpec

CURVATURES = tuple(round(i / 9, 6) for i in range(10))
MASK_RATIOS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

PROFILES = {
    "full": {},
    "desk": {
        "n_steps": 100,
        "jump_length": 10,
        "n_resamples": 3,
        "mask_ratios": [0.3, 0.5, 0.7],
        "seeds": [0, 1, 2, 3, 4],
        "curvatures": [0.0],
        "source_angles": [90.0, 10.0],
        "base_channels": 16,
        "epochs": 60,
        "learning_rate": 1e-3,
    },
}


@dataclass
class ExperimentConfig:
    room_dims: list = field(default_factory=lambda: list(DEFAULT_DIMS))
    speed_of_sound: float = 343.0
    sample_rate: float = 8000.0
    n_mics: int = 64
    t60_train: float = 0.3
    t60_infer: float = 0.6
    k_train: int = 1024
    k_infer: int = 2048
    n_train_images: int = 8
    n_train_patches: int = 176
    train_curvatures: list = field(default_factory=lambda: list(CURVATURES))
    train_angles: list = field(default_factory=lambda: list(SOURCE_ANGLES))
    curvatures: list = field(default_factory=lambda: list(CURVATURES))
    source_angles: list = field(default_factory=lambda: list(SOURCE_ANGLES))
    mask_ratios: list = field(default_factory=lambda: list(MASK_RATIOS))
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    n_steps: int = 1000
    beta_start: float = 1e-4
    beta_end: float = 0.02
    base_channels: int = 32
    depth: int = 3
    time_embedding_dim: int = 64
    epochs: int = 200
    batch_size: int = 16
    learning_rate: float = 2e-4
    ema_decay: float = 0.999
    flip_augment: bool = True
    jump_length: int = 10
    n_resamples: int = 10
    output_dir: str = "runs/default"
    profile: str = "full"

    def __post_init__(self):
        if len(self.room_dims) != 3 or any(d <= 0 for d in self.room_dims):
            raise ValueError(f"room_dims must be three positive lengths, got {self.room_dims}")
        if self.n_mics < 2:
            raise ValueError("n_mics must be at least 2")
        if self.k_train < 1 or self.k_infer < 1:
            raise ValueError("RIR lengths must be positive")
        if any(not 0 <= c <= 1 for c in list(self.curvatures) + list(self.train_curvatures)):
            raise ValueError("curvatures must lie in [0, 1]")
        if any(not 0 <= r < 1 for r in self.mask_ratios):
            raise ValueError("mask ratios must lie in [0, 1)")
        if self.n_train_images < 1 or self.n_train_patches < 1:
            raise ValueError("training set needs at least one image and one patch")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; choose from {sorted(PROFILES)}")

    @classmethod
    def for_profile(cls, profile: str = "full", **overrides) -> "ExperimentConfig":
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
        values = dict(PROFILES[profile], profile=profile)
        values.update(overrides)
        return cls(**values)

    def room(self, reflection: float = 0.0) -> RoomSpec:
        return RoomSpec(tuple(self.room_dims), reflection, self.speed_of_sound, self.sample_rate)

    def replace(self, **overrides) -> "ExperimentConfig":
        return dataclasses.replace(self, **overrides)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        profile = d.get("profile", "full")
        values = dict(PROFILES.get(profile, {}))
        values.update(d)
        return cls(**values)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def inpainter_params(self) -> dict:
        return {
            "n_steps": self.n_steps, "beta_start": self.beta_start, "beta_end": self.beta_end,
            "base_channels": self.base_channels, "depth": self.depth,
            "time_embedding_dim": self.time_embedding_dim, "n_epochs": self.epochs,
            "batch_size": self.batch_size, "learning_rate": self.learning_rate,
            "ema_decay": self.ema_decay, "flip_augment": self.flip_augment,
            "jump_length": self.jump_length, "n_resamples": self.n_resamples,
        }
