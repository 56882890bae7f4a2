"""Reconstruction quality measures and Schroeder decay analysis."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

# NMSE of an exact reconstruction.
EXACT_NMSE_DB = float("-inf")


def _as_array(m) -> np.ndarray:
    return np.asarray(getattr(m, "data", m), dtype=float)


def _columns(truth, estimate, missing):
    H, Hh = _as_array(truth), _as_array(estimate)
    if H.shape != Hh.shape:
        raise ValueError(f"shape mismatch: truth {H.shape} vs estimate {Hh.shape}")
    idx = np.asarray(sorted(missing), dtype=int)
    return H[:, idx], Hh[:, idx], idx


def per_mic_nmse(truth, estimate, missing) -> np.ndarray:
    """Linear (not dB) normalized error for each missing microphone; NaN where the truth is silent."""
    h, hh, _ = _columns(truth, estimate, missing)
    num = np.sum((hh - h) ** 2, axis=0)
    den = np.sum(h ** 2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.nan)


def per_mic_cd(truth, estimate, missing) -> np.ndarray:
    """Cosine distance for each missing microphone; NaN where either column has zero norm."""
    h, hh, _ = _columns(truth, estimate, missing)
    nh = np.linalg.norm(h, axis=0)
    nhh = np.linalg.norm(hh, axis=0)
    ok = (nh > 0) & (nhh > 0)
    cos = np.sum(h * hh, axis=0) / np.where(ok, nh * nhh, 1.0)
    cd = 1.0 - np.clip(cos, -1.0, 1.0) ** 2
    return np.where(ok, cd, np.nan)


def nmse(truth, estimate, missing) -> float:
    """Normalized mean squared error in dB, averaged over the ``missing`` microphones.

    Returns ``EXACT_NMSE_DB`` when the estimate matches exactly (or the set is empty).
    Raises ``ValueError`` if a truth column in the set has zero energy.
    """
    if len(missing) == 0:
        return EXACT_NMSE_DB
    ratios = per_mic_nmse(truth, estimate, missing)
    if np.any(np.isnan(ratios)):
        bad = np.asarray(sorted(missing))[np.isnan(ratios)]
        raise ValueError(f"zero-energy truth RIR at microphones {bad.tolist()}")
    mean = float(np.mean(ratios))
    return EXACT_NMSE_DB if mean == 0.0 else 10.0 * np.log10(mean)


def cosine_distance(truth, estimate, missing) -> float:
    """Mean of ``1 - cos^2`` between true and estimated RIRs over ``missing``; lies in [0, 1]."""
    if len(missing) == 0:
        return 0.0
    cd = per_mic_cd(truth, estimate, missing)
    if np.any(np.isnan(cd)):
        bad = np.asarray(sorted(missing))[np.isnan(cd)]
        raise ValueError(f"zero-norm RIR at microphones {bad.tolist()}")
    return float(np.mean(cd))


def edc(h) -> np.ndarray:
    """Schroeder energy decay curve in dB, normalized to 0 dB at the first sample.

    Samples after the last non-zero tap are ``-inf``.
    """
    h = np.asarray(h, dtype=float)
    energy = np.cumsum((h ** 2)[::-1])[::-1]
    if energy.size == 0 or energy[0] <= 0:
        raise ValueError("energy decay curve undefined for an all-zero response")
    with np.errstate(divide="ignore"):
        curve = 10.0 * np.log10(energy / energy[0])
    # Round-off in the reverse cumsum can produce tiny upward steps.
    return np.minimum.accumulate(curve)


def t60_from_edc(curve, fs: float, *, start_db: float = -5.0, stop_db: float = -35.0) -> float:
    """Reverberation time from a least-squares line over the ``start_db`` to ``stop_db`` span of an EDC."""
    curve = np.asarray(curve, dtype=float)
    below_stop = np.nonzero(curve <= stop_db)[0]
    if below_stop.size == 0:
        raise ValueError(f"decay curve never reaches {stop_db} dB")
    i0 = int(np.nonzero(curve <= start_db)[0][0])
    i1 = int(below_stop[0])
    if i1 - i0 < 2:
        raise ValueError("too few samples in the fit range")
    n = np.arange(i0, i1 + 1)
    slope, _ = np.polyfit(n / fs, curve[i0:i1 + 1], 1)
    if slope >= 0:
        raise ValueError("decay curve is not decaying in the fit range")
    return float(-60.0 / slope)


@dataclass
class EvalReport:
    method: str
    nmse_db: float
    cd: float
    per_mic: list[dict] = field(default_factory=list)
    key: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(truth, estimate, missing, *, method: str = "", key: dict | None = None) -> EvalReport:
    """Aggregate and per-microphone scores over the missing set.

    Microphones whose scores are undefined are kept in the breakdown with an
    ``error`` entry and excluded from the aggregates.
    """
    missing = sorted(int(i) for i in missing)
    ratios = per_mic_nmse(truth, estimate, missing)
    cds = per_mic_cd(truth, estimate, missing)
    per_mic = []
    for i, r, c in zip(missing, ratios, cds):
        entry = {"mic": i,
                 "nmse_db": float(10 * np.log10(r)) if r > 0 else EXACT_NMSE_DB,
                 "cd": float(c)}
        if np.isnan(r) or np.isnan(c):
            entry["error"] = "zero-energy RIR"
            entry["nmse_db"] = float("nan")
        per_mic.append(entry)
    ok = ~(np.isnan(ratios) | np.isnan(cds))
    if not missing:
        agg_nmse, agg_cd = EXACT_NMSE_DB, 0.0
    elif not ok.any():
        agg_nmse, agg_cd = float("nan"), float("nan")
    else:
        mean = float(np.mean(ratios[ok]))
        agg_nmse = EXACT_NMSE_DB if mean == 0 else float(10 * np.log10(mean))
        agg_cd = float(np.mean(cds[ok]))
    return EvalReport(method, agg_nmse, agg_cd, per_mic, dict(key or {}))
