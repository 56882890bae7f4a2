"""Image-source simulation of shoebox rooms and arc-shaped microphone arrays."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_DIMS = (6.0, 5.5, 2.8)
ARRAY_HEIGHT = 1.4
ULA_SPAN = 3.0
SEMICIRCLE_RADIUS = 1.5
SOURCE_RADIUS = 2.0
SOURCE_ANGLES = (10.0, 30.0, 50.0, 70.0, 90.0, 110.0, 130.0, 150.0, 170.0)

# Fractional-delay kernel: 81 taps, Hann-windowed sinc.
KERNEL_TAPS = 81
_HALF = KERNEL_TAPS // 2
_IMAGE_CHUNK = 65536


@dataclass(frozen=True)
class RoomSpec:
    """Shoebox room.

    ``reflection`` holds one amplitude reflection coefficient per wall in the
    order (x=0, x=Lx, y=0, y=Ly, z=0, z=Lz). A scalar is broadcast to all six.
    """

    dims: tuple[float, float, float] = DEFAULT_DIMS
    reflection: tuple[float, ...] | float = 0.0
    speed_of_sound: float = 343.0
    sample_rate: float = 8000.0

    def __post_init__(self):
        dims = tuple(float(d) for d in self.dims)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise ValueError(f"room dims must be three positive lengths, got {self.dims}")
        refl = self.reflection
        if np.isscalar(refl):
            refl = (float(refl),) * 6
        refl = tuple(float(b) for b in refl)
        if len(refl) != 6 or any(not 0.0 <= b < 1.0 for b in refl):
            raise ValueError(f"reflection coefficients must be six values in [0, 1), got {self.reflection}")
        if self.sample_rate <= 0 or self.speed_of_sound <= 0:
            raise ValueError("sample_rate and speed_of_sound must be positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "reflection", refl)

    @property
    def volume(self) -> float:
        return math.prod(self.dims)

    @property
    def surface_area(self) -> float:
        lx, ly, lz = self.dims
        return 2.0 * (lx * ly + lx * lz + ly * lz)

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.dims) / 2.0

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p > 0.0) and np.all(p < np.asarray(self.dims)))

    def with_reflection(self, beta) -> "RoomSpec":
        return RoomSpec(self.dims, beta, self.speed_of_sound, self.sample_rate)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "reflection": list(self.reflection),
            "speed_of_sound": self.speed_of_sound,
            "sample_rate": self.sample_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RoomSpec":
        return cls(tuple(d["dims"]), tuple(d["reflection"]), d["speed_of_sound"], d["sample_rate"])


@dataclass(frozen=True)
class ArrayGeometry:
    positions: np.ndarray
    curvature: float = 0.0
    label: str = ""

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions must have shape (N, 3), got {pos.shape}")
        if pos.shape[0] < 1:
            raise ValueError("array needs at least one microphone")
        object.__setattr__(self, "positions", pos)

    @property
    def n_mics(self) -> int:
        return self.positions.shape[0]

    @property
    def center(self) -> np.ndarray:
        # Midpoint of the end microphones; shared by every curvature of an arc family.
        return (self.positions[0] + self.positions[-1]) / 2.0

    def to_dict(self) -> dict:
        return {"positions": self.positions.tolist(), "curvature": self.curvature, "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "ArrayGeometry":
        return cls(np.asarray(d["positions"]), d.get("curvature", 0.0), d.get("label", ""))


@dataclass(frozen=True)
class SourceSpec:
    position: np.ndarray
    angle_deg: float = float("nan")

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,):
            raise ValueError(f"source position must be a 3-vector, got shape {pos.shape}")
        object.__setattr__(self, "position", pos)

    def to_dict(self) -> dict:
        return {"position": self.position.tolist(), "angle_deg": self.angle_deg}

    @classmethod
    def from_dict(cls, d: dict) -> "SourceSpec":
        return cls(np.asarray(d["position"]), d.get("angle_deg", float("nan")))


@dataclass
class RirMatrix:
    """Stacked RIRs, time-major: ``data[k, i]`` is sample k of microphone i."""

    data: np.ndarray
    sample_rate: float
    geometry: ArrayGeometry | None = None
    source: SourceSpec | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError(f"RIR matrix must be 2-D (K, N), got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("RIR matrix contains non-finite amplitudes")
        if self.geometry is not None and self.geometry.n_mics != data.shape[1]:
            raise ValueError("geometry microphone count does not match matrix width")
        self.data = data

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_mics(self) -> int:
        return self.data.shape[1]

    def with_data(self, data) -> "RirMatrix":
        return RirMatrix(data, self.sample_rate, self.geometry, self.source, dict(self.meta))


def make_arc_array(n_mics: int = 64, curvature: float = 0.0, room: RoomSpec | None = None, *,
                   span: float = ULA_SPAN, radius: float = SEMICIRCLE_RADIUS,
                   height: float = ARRAY_HEIGHT) -> ArrayGeometry:
    """Microphone arc morphing from a ULA (``curvature=0``) to a semi-circle (``curvature=1``).

    The ULA lies along x through the room's horizontal center. The semi-circle
    shares the ULA's end points and bulges towards -y, away from the sources.
    Intermediate curvatures interpolate each microphone position linearly.
    """
    if n_mics < 2:
        raise ValueError(f"need at least 2 microphones, got {n_mics}")
    if not 0.0 <= curvature <= 1.0:
        raise ValueError(f"curvature must lie in [0, 1], got {curvature}")
    room = room or RoomSpec()
    cx, cy, _ = room.center

    u = np.linspace(-0.5, 0.5, n_mics)
    lin = np.column_stack([cx + span * u, np.full(n_mics, cy), np.full(n_mics, height)])
    theta = np.pi * (1.0 - np.linspace(0.0, 1.0, n_mics))
    circ = np.column_stack([cx + radius * np.cos(theta), cy - radius * np.sin(theta),
                            np.full(n_mics, height)])
    # Exact end points so every curvature shares the same array center.
    circ[[0, -1], 1] = cy

    positions = (1.0 - curvature) * lin + curvature * circ
    for p in positions:
        if not room.contains(p):
            raise ValueError(f"microphone {p} lies outside the room {room.dims}")
    return ArrayGeometry(positions, float(curvature), f"arc-{curvature:.3f}")


def make_source_positions(room: RoomSpec, array: ArrayGeometry, *, radius: float = SOURCE_RADIUS,
                          angles=SOURCE_ANGLES) -> list[SourceSpec]:
    """Sources on a semi-circle around the array center, angle measured from the +x array axis."""
    center = array.center
    sources = []
    for ang in angles:
        rad = math.radians(ang)
        pos = center + radius * np.array([math.cos(rad), math.sin(rad), 0.0])
        if not room.contains(pos):
            raise ValueError(f"source at {ang} deg ({pos}) lies outside the room")
        sources.append(SourceSpec(pos, float(ang)))
    return sources


def source_at_angle(room: RoomSpec, array: ArrayGeometry, angle_deg: float,
                    radius: float = SOURCE_RADIUS) -> SourceSpec:
    return make_source_positions(room, array, radius=radius, angles=(angle_deg,))[0]


def reflection_coeff_for_t60(room: RoomSpec, target_t60: float) -> float:
    """Uniform wall reflection coefficient reaching ``target_t60`` by Sabine's formula."""
    if target_t60 <= 0:
        raise ValueError(f"target T60 must be positive, got {target_t60}")
    alpha = 0.161 * room.volume / (target_t60 * room.surface_area)
    if alpha >= 1.0:
        raise ValueError(f"T60={target_t60} s is too short for this room (absorption {alpha:.3f} >= 1)")
    return math.sqrt(1.0 - alpha)


def _image_sources(room: RoomSpec, source, max_dist: float, mic) -> tuple[np.ndarray, np.ndarray]:
    """Image positions and wall-attenuation gains within ``max_dist`` of ``mic``."""
    L = np.asarray(room.dims)
    s = np.asarray(source, dtype=float)
    m = np.asarray(mic, dtype=float)
    beta = np.asarray(room.reflection).reshape(3, 2)

    coords, gains = [], []
    for axis in range(3):
        nmax = int(math.ceil(max_dist / (2.0 * L[axis]))) + 1
        n = np.arange(-nmax, nmax + 1)
        c, g = [], []
        for q in (0, 1):
            x = (1 - 2 * q) * s[axis] + 2.0 * n * L[axis]
            lo, hi = beta[axis]
            with np.errstate(divide="ignore"):
                gain = np.power(lo, np.abs(n - q)) * np.power(hi, np.abs(n))
            c.append(x - m[axis])
            g.append(gain)
        coords.append(np.concatenate(c))
        gains.append(np.concatenate(g))

    # Prune per-axis offsets that alone exceed the radius before forming the grid.
    keep = [np.abs(c) <= max_dist for c in coords]
    coords = [c[k] for c, k in zip(coords, keep)]
    gains = [g[k] for g, k in zip(gains, keep)]

    dx2 = coords[0][:, None] ** 2
    dxy2 = dx2 + coords[1][None, :] ** 2
    ix, iy = np.nonzero(dxy2 <= max_dist ** 2)
    rxy2 = dxy2[ix, iy]
    gxy = gains[0][ix] * gains[1][iy]
    d2 = rxy2[:, None] + coords[2][None, :] ** 2
    ia, iz = np.nonzero(d2 <= max_dist ** 2)
    dist = np.sqrt(d2[ia, iz])
    gain = gxy[ia] * gains[2][iz]
    nz = gain > 0
    return dist[nz], gain[nz]


def _render(delays: np.ndarray, amps: np.ndarray, n_samples: int) -> np.ndarray:
    out = np.zeros(n_samples)
    offsets = np.arange(-_HALF, _HALF + 1)
    for start in range(0, delays.size, _IMAGE_CHUNK):
        tau = delays[start:start + _IMAGE_CHUNK]
        amp = amps[start:start + _IMAGE_CHUNK]
        n0 = np.rint(tau).astype(np.int64)
        idx = n0[:, None] + offsets[None, :]
        x = idx - tau[:, None]
        w = 0.5 * (1.0 + np.cos(np.pi * x / (_HALF + 1)))
        taps = amp[:, None] * np.sinc(x) * w
        valid = (idx >= 0) & (idx < n_samples)
        out += np.bincount(idx[valid], weights=taps[valid], minlength=n_samples)
    return out


def simulate_rir(room: RoomSpec, source, mic, n_samples: int) -> np.ndarray:
    """Impulse response from ``source`` to ``mic`` truncated to ``n_samples``.

    Every image whose kernel can reach the analysis window is included, so the
    expansion order grows with ``n_samples`` rather than being capped.
    """
    if n_samples <= 0:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    src = source.position if isinstance(source, SourceSpec) else np.asarray(source, dtype=float)
    mic = np.asarray(mic, dtype=float)
    if not room.contains(src):
        raise ValueError(f"source {src} lies outside the room")
    if not room.contains(mic):
        raise ValueError(f"microphone {mic} lies outside the room")
    if np.linalg.norm(src - mic) < 1e-9:
        raise ValueError("source and microphone coincide")

    c, fs = room.speed_of_sound, room.sample_rate
    max_dist = (n_samples + _HALF + 1) * c / fs
    dist, gain = _image_sources(room, src, max_dist, mic)
    order = np.argsort(dist, kind="stable")
    dist, gain = dist[order], gain[order]
    return _render(dist * fs / c, gain / (4.0 * np.pi * dist), n_samples)


def simulate_matrix(room: RoomSpec, source: SourceSpec, array: ArrayGeometry, n_samples: int) -> RirMatrix:
    cols = [simulate_rir(room, source, p, n_samples) for p in array.positions]
    return RirMatrix(np.column_stack(cols), room.sample_rate, array, source,
                     {"room": room.to_dict()})
