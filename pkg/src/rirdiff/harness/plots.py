"""Static SVG figures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "rirdiff"

LABELS = {"nmse_db": "NMSE [dB]", "cd": "CD", "mask_ratio": "mask ratio",
          "curvature": "array curvature", "source_angle_deg": "source angle [deg]"}


def _save(fig, path):
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def line_chart(rows, x: str, metric: str, path, *, title: str = ""):
    """Median of ``metric`` against ``x``, one line per method. ``rows`` are CSV dicts."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    methods = sorted({r["method"] for r in rows})
    for method in methods:
        pts = {}
        for r in rows:
            if r["method"] != method or r["status"] != "ok":
                continue
            v = float(r[metric])
            if np.isfinite(v):
                pts.setdefault(float(r[x]), []).append(v)
        xs = sorted(pts)
        ax.plot(xs, [np.median(pts[k]) for k in xs], marker="o", label=method)
    ax.set_xlabel(LABELS.get(x, x))
    ax.set_ylabel(LABELS.get(metric, metric))
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def edc_chart(curves: dict, fs: float, path, *, title: str = ""):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, curve in curves.items():
        curve = np.asarray(curve)
        ok = np.isfinite(curve)
        ax.plot(np.arange(curve.size)[ok] / fs, curve[ok], label=label)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("EDC [dB]")
    ax.set_ylim(bottom=-80, top=5)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)
