"""RIR matrices as grayscale images: column masks, overlapping patch tiling and reassembly."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .room_sim import RirMatrix

PATCH_SIZE = 64
OVERLAP = 16


@dataclass(frozen=True)
class Mask:
    """Measured/missing state of each microphone column."""

    measured: np.ndarray
    ratio: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        m = np.asarray(self.measured, dtype=bool)
        if m.ndim != 1:
            raise ValueError("mask must be a 1-D boolean vector")
        m.setflags(write=False)
        object.__setattr__(self, "measured", m)

    @property
    def n_mics(self) -> int:
        return self.measured.size

    @property
    def missing(self) -> np.ndarray:
        return np.flatnonzero(~self.measured)

    @property
    def measured_idx(self) -> np.ndarray:
        return np.flatnonzero(self.measured)

    @property
    def n_measured(self) -> int:
        return int(self.measured.sum())

    @property
    def n_missing(self) -> int:
        return self.n_mics - self.n_measured

    @classmethod
    def all_measured(cls, n_mics: int) -> "Mask":
        return cls(np.ones(n_mics, dtype=bool), 0.0, None)

    def to_dict(self) -> dict:
        return {"measured": self.measured.astype(int).tolist(), "ratio": self.ratio, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "Mask":
        return cls(np.asarray(d["measured"], dtype=bool), d.get("ratio", 0.0), d.get("seed"))


def n_missing_for(n_mics: int, ratio: float) -> int:
    # Round half up; the epsilon absorbs binary round-off such as 0.7 * 64.
    return int(math.floor(ratio * n_mics + 0.5 + 1e-9))


def make_mask(n_mics: int, ratio: float, seed: int | None = None) -> Mask:
    """Randomly mark ``round(ratio * n_mics)`` columns as missing."""
    if not 0.0 <= ratio < 1.0:
        raise ValueError(f"mask ratio must lie in [0, 1), got {ratio}")
    n_missing = n_missing_for(n_mics, ratio)
    if n_mics - n_missing < 2:
        raise ValueError(f"ratio {ratio} leaves fewer than 2 measured microphones out of {n_mics}")
    rng = np.random.default_rng(seed)
    measured = np.ones(n_mics, dtype=bool)
    measured[rng.choice(n_mics, size=n_missing, replace=False)] = False
    return Mask(measured, float(ratio), seed)


def _offsets(length: int, size: int, stride: int) -> np.ndarray:
    """Tile starts at ``stride``; the last tile is clamped to end on the last pixel."""
    if length <= size:
        return np.array([0])
    offs = list(range(0, length - size + 1, stride))
    if offs[-1] != length - size:
        offs.append(length - size)
    return np.asarray(offs)


def _ownership(offsets: np.ndarray, size: int, length: int) -> list[tuple[int, int]]:
    """Half-open range each tile owns; overlaps are split at their midpoint."""
    bounds = [0]
    for a, b in zip(offsets[:-1], offsets[1:]):
        bounds.append((int(b) + int(a) + size) // 2)
    bounds.append(length)
    return [(bounds[i], bounds[i + 1]) for i in range(len(offsets))]


@dataclass
class PatchGrid:
    """Normalized, masked patches of one RIR image plus everything needed to undo the tiling.

    ``pixels[p]`` holds patch ``p`` scaled to [-1, 1] with missing columns zeroed;
    its top-left corner in the padded image is ``offsets[p]``.
    """

    pixels: np.ndarray
    scales: np.ndarray
    offsets: np.ndarray
    source_dims: tuple[int, int]
    padded_dims: tuple[int, int]
    column_mask: np.ndarray
    degenerate: np.ndarray
    patch_size: int = PATCH_SIZE
    overlap: int = OVERLAP

    @property
    def n_patches(self) -> int:
        return self.pixels.shape[0]

    @property
    def stride(self) -> int:
        return self.patch_size - self.overlap

    def pixel_masks(self) -> np.ndarray:
        """Boolean known-pixel mask per patch, shape ``(P, size, size)``."""
        s = self.patch_size
        out = np.empty((self.n_patches, s, s), dtype=bool)
        for p, (_, c) in enumerate(self.offsets):
            out[p] = np.broadcast_to(self.column_mask[c:c + s], (s, s))
        return out

    def ownership(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Row and column ranges (padded coordinates) owned by each patch."""
        s = self.patch_size
        rows = np.unique(self.offsets[:, 0])
        cols = np.unique(self.offsets[:, 1])
        row_own = dict(zip(rows.tolist(), _ownership(rows, s, self.padded_dims[0])))
        col_own = dict(zip(cols.tolist(), _ownership(cols, s, self.padded_dims[1])))
        return [(row_own[int(r)], col_own[int(c)]) for r, c in self.offsets]


def _pad(image: np.ndarray, column_mask: np.ndarray, size: int):
    K, N = image.shape
    if N < size:
        image = np.concatenate([image, np.repeat(image[:, -1:], size - N, axis=1)], axis=1)
        column_mask = np.concatenate([column_mask, np.repeat(column_mask[-1:], size - N)])
    if K < size:
        image = np.concatenate([image, np.zeros((size - K, image.shape[1]))], axis=0)
    return image, column_mask


def split_patches(matrix, mask: Mask | None = None, *, patch_size: int = PATCH_SIZE,
                  overlap: int = OVERLAP) -> PatchGrid:
    """Tile an RIR image into normalized, column-masked patches.

    Narrow images are widened by repeating the rightmost column (which keeps
    that column's mask state); short images are zero-padded in time. Each
    patch is divided by the peak magnitude of its measured entries, then the
    missing columns are zeroed.
    """
    image = np.asarray(getattr(matrix, "data", matrix), dtype=float)
    if image.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {image.shape}")
    K, N = image.shape
    if K < 1 or N < 2:
        raise ValueError(f"image must have K >= 1 samples and N >= 2 columns, got {image.shape}")
    if not 0 <= overlap < patch_size:
        raise ValueError("overlap must be smaller than the patch size")
    mask = mask if mask is not None else Mask.all_measured(N)
    if mask.n_mics != N:
        raise ValueError(f"mask covers {mask.n_mics} columns but image has {N}")

    padded, col_mask = _pad(image, mask.measured, patch_size)
    Kp, Np = padded.shape
    stride = patch_size - overlap
    rows = _offsets(Kp, patch_size, stride)
    cols = _offsets(Np, patch_size, stride)
    offsets = np.array([(r, c) for c in cols for r in rows], dtype=int)

    P = len(offsets)
    pixels = np.empty((P, patch_size, patch_size))
    scales = np.empty(P)
    degenerate = np.zeros(P, dtype=bool)
    for p, (r, c) in enumerate(offsets):
        block = padded[r:r + patch_size, c:c + patch_size]
        known = col_mask[c:c + patch_size]
        peak = np.max(np.abs(block[:, known])) if known.any() else 0.0
        if peak > 0:
            scales[p] = peak
        else:
            scales[p] = 1.0
            degenerate[p] = True
        pix = np.clip(block / scales[p], -1.0, 1.0)
        pix[:, ~known] = 0.0
        pixels[p] = pix
    if degenerate.any():
        warnings.warn(f"{int(degenerate.sum())} patch(es) have no measured energy; scale set to 1.0",
                      RuntimeWarning, stacklevel=2)
    return PatchGrid(pixels, scales, offsets, (K, N), (Kp, Np), col_mask.copy(), degenerate,
                     patch_size, overlap)


def reassemble(grid: PatchGrid, inpainted=None) -> np.ndarray:
    """Rescale patches and write back only the pixels each patch owns; returns a (K, N) image."""
    pix = grid.pixels if inpainted is None else np.asarray(inpainted, dtype=float)
    s = grid.patch_size
    if pix.shape != (grid.n_patches, s, s):
        raise ValueError(f"expected patches of shape {(grid.n_patches, s, s)}, got {pix.shape}")
    out = np.zeros(grid.padded_dims)
    for p, ((r0, r1), (c0, c1)) in enumerate(grid.ownership()):
        r, c = grid.offsets[p]
        out[r0:r1, c0:c1] = grid.scales[p] * pix[p, r0 - r:r1 - r, c0 - c:c1 - c]
    K, N = grid.source_dims
    return out[:K, :N]


def complete_matrix(original: RirMatrix, mask: Mask, reconstructed) -> RirMatrix:
    """Keep measured columns verbatim and take missing columns from ``reconstructed``."""
    rec = np.asarray(getattr(reconstructed, "data", reconstructed), dtype=float)
    if rec.shape != original.data.shape:
        raise ValueError(f"shape mismatch: original {original.data.shape} vs reconstruction {rec.shape}")
    if mask.n_mics != original.n_mics:
        raise ValueError("mask length does not match the number of microphones")
    out = np.where(mask.measured[None, :], original.data, rec)
    return original.with_data(out)


def masked_image(matrix, mask: Mask) -> np.ndarray:
    data = np.asarray(getattr(matrix, "data", matrix), dtype=float)
    return np.where(mask.measured[None, :], data, 0.0)
