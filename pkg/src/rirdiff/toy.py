"""Synthetic straight-stripe patches: a stand-in for the straight wavefronts of ULA RIR images."""

import numpy as np


def stripe_patches(n: int, size: int = 64, seed: int = 0, *, max_lines: int = 3,
                   width: float = 1.5) -> np.ndarray:
    """``n`` patches of Gaussian-profile straight lines with random slope, offset and sign.

    Each patch is scaled so its peak magnitude is 1.
    """
    rng = np.random.default_rng(seed)
    rows, cols = np.mgrid[0:size, 0:size].astype(float)
    out = np.zeros((n, size, size))
    for k in range(n):
        img = np.zeros((size, size))
        for _ in range(rng.integers(1, max_lines + 1)):
            slope = rng.uniform(-0.6, 0.6)
            offset = rng.uniform(0, size)
            amp = rng.choice([-1.0, 1.0]) * rng.uniform(0.4, 1.0)
            dist = (rows - (offset + slope * (cols - size / 2))) / np.sqrt(1 + slope ** 2)
            img += amp * np.exp(-0.5 * (dist / width) ** 2)
        out[k] = img / np.abs(img).max()
    return out
