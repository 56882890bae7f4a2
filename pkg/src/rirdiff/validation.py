"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np


def check_rir_array(X, *, min_mics: int = 2) -> np.ndarray:
    """Return ``X`` (or ``X.data``) as a finite float (K, N) array."""
    arr = np.asarray(getattr(X, "data", X), dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D (K, N) RIR array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < min_mics:
        raise ValueError(f"RIR array needs K >= 1 and N >= {min_mics}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("RIR array contains NaN or inf")
    return arr


def check_mask(mask, n_mics: int):
    if mask.n_mics != n_mics:
        raise ValueError(f"mask covers {mask.n_mics} microphones, data has {n_mics}")
    if mask.n_measured < 2:
        raise ValueError("at least 2 measured microphones are required")
    return mask


def check_patches(X, size: int = 64) -> np.ndarray:
    """Return a float32 array of shape (n, size, size) with values in [-1, 1]."""
    arr = np.asarray(X, dtype=np.float32)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim == 4 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 3 or arr.shape[1:] != (size, size):
        raise ValueError(f"expected patches of shape (n, {size}, {size}), got {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("patch dataset is empty")
    if not np.all(np.isfinite(arr)) or np.abs(arr).max() > 1.0 + 1e-6:
        raise ValueError("patch pixels must be finite and lie in [-1, 1]")
    return arr
