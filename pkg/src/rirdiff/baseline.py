"""Spline cubic interpolation (SCI) across microphone columns."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline
from sklearn.base import BaseEstimator, TransformerMixin

from .imaging import Mask
from .room_sim import RirMatrix
from .validation import check_mask, check_rir_array


def _interpolate(image: np.ndarray, mask: Mask) -> np.ndarray:
    known = mask.measured_idx
    missing = mask.missing
    if known.size < 2:
        raise ValueError(f"spline interpolation needs at least 2 measured microphones, got {known.size}")
    out = image.copy()
    if missing.size == 0:
        return out
    y = image[:, known]
    x = known.astype(float)
    if known.size == 3:
        # Natural spline is ill-suited to 3 knots; use the interpolating parabola.
        coef = np.polyfit(x, y.T, 2)
        xm = missing.astype(float)
        out[:, missing] = (coef[0][:, None] * xm ** 2 + coef[1][:, None] * xm + coef[2][:, None])
    else:
        # With 2 knots the natural spline is the straight line through them.
        spline = CubicSpline(x, y, axis=1, bc_type="natural", extrapolate=True)
        out[:, missing] = spline(missing.astype(float))
    return out


def sci_interpolate(matrix: RirMatrix, mask: Mask) -> RirMatrix:
    """Fill missing microphone columns with a natural cubic spline over microphone index.

    Each time sample is interpolated independently; measured columns are copied
    verbatim. Missing columns beyond the outermost measured microphones are
    extrapolated with the end polynomial pieces.
    """
    image = check_rir_array(matrix.data)
    check_mask(mask, image.shape[1])
    out = _interpolate(image, mask)
    out[:, mask.measured] = image[:, mask.measured]
    return matrix.with_data(out)


class SplineInterpolator(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`sci_interpolate`. Stateless; ``fit`` only validates."""

    def fit(self, X=None, y=None):
        return self

    def transform(self, X, mask: Mask):
        image = check_rir_array(X)
        check_mask(mask, image.shape[1])
        out = _interpolate(image, mask)
        out[:, mask.measured] = image[:, mask.measured]
        return out

    def reconstruct(self, matrix: RirMatrix, mask: Mask) -> RirMatrix:
        return sci_interpolate(matrix, mask)
