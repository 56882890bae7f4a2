"""Sweeps over (curvature, source angle, mask ratio, seed) scoring inpainting against SCI."""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from ..baseline import sci_interpolate
from ..imaging import make_mask, masked_image
from ..metrics import EvalReport, edc, evaluate, t60_from_edc
from .config import ExperimentConfig
from .dataset import simulate_scene
from .io import export_rir_image
from .plots import edc_chart, line_chart

logger = logging.getLogger(__name__)

CSV_FIELDS = ["curvature", "source_angle_deg", "mask_ratio", "seed", "method", "nmse_db", "cd",
              "n_missing", "t60_truth", "t60_estimate", "status", "error"]
KEY_FIELDS = CSV_FIELDS[:5]
METHODS = ("diffusion", "sci")


@dataclass(frozen=True)
class Cell:
    curvature: float
    angle: float
    ratio: float
    seed: int

    @property
    def tag(self) -> str:
        return f"c{self.curvature:.3f}_a{self.angle:g}_r{self.ratio:g}_s{self.seed}"


@dataclass
class ExperimentResult:
    reports: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    csv_path: Path | None = None
    artifacts: list = field(default_factory=list)


def mask_seed(seed: int, ratio: float) -> int:
    return int(np.random.SeedSequence([int(seed), int(round(ratio * 1e6))]).generate_state(1)[0])


def sample_seed(cell: Cell) -> int:
    parts = [cell.seed, round(cell.ratio * 1e6), round(cell.curvature * 1e6), round(cell.angle * 1e3)]
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def grid_cells(config: ExperimentConfig) -> list[Cell]:
    return [Cell(float(c), float(a), float(r), int(s)) for c, a, r, s in
            itertools.product(config.curvatures, config.source_angles, config.mask_ratios, config.seeds)]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _median_t60(data, idx, fs) -> float:
    vals = []
    for i in idx:
        try:
            vals.append(t60_from_edc(edc(data[:, i]), fs))
        except ValueError:
            continue
    return float(np.median(vals)) if vals else math.nan


def _key_dict(cell: Cell, method: str) -> dict:
    return {"curvature": cell.curvature, "source_angle_deg": cell.angle, "mask_ratio": cell.ratio,
            "seed": cell.seed, "method": method}


def run_cell(config: ExperimentConfig, inpainter, cell: Cell, image_dir: Path | None = None):
    """Score both methods on one cell. Failures become rows with ``status == "error"``."""
    rows, reports, artifacts = [], [], []
    try:
        truth = simulate_scene(config, cell.curvature, cell.angle, config.t60_infer, config.k_infer)
        mask = make_mask(truth.n_mics, cell.ratio, mask_seed(cell.seed, cell.ratio))
    except Exception as exc:  # noqa: BLE001 - recorded per cell
        logger.exception("cell %s failed during simulation", cell.tag)
        for method in METHODS:
            rows.append({**_key_dict(cell, method), "nmse_db": math.nan, "cd": math.nan, "n_missing": -1,
                         "t60_truth": math.nan, "t60_estimate": math.nan, "status": "error",
                         "error": f"{type(exc).__name__}: {exc}"})
        return rows, reports, artifacts

    fs = truth.sample_rate
    missing = mask.missing
    t60_truth = _median_t60(truth.data, missing, fs)
    estimates = {}
    for method in METHODS:
        key = _key_dict(cell, method)
        try:
            if method == "diffusion":
                est = inpainter.inpaint(truth, mask, seed=sample_seed(cell))
            else:
                est = sci_interpolate(truth, mask)
            rep = evaluate(truth, est, missing, method=method, key=key)
            estimates[method] = est
            reports.append(rep)
            rows.append({**key, "nmse_db": rep.nmse_db, "cd": rep.cd, "n_missing": int(missing.size),
                         "t60_truth": t60_truth, "t60_estimate": _median_t60(est.data, missing, fs),
                         "status": "ok", "error": ""})
        except Exception as exc:  # noqa: BLE001 - recorded per cell
            logger.exception("cell %s method %s failed", cell.tag, method)
            rows.append({**key, "nmse_db": math.nan, "cd": math.nan, "n_missing": int(missing.size),
                         "t60_truth": t60_truth, "t60_estimate": math.nan, "status": "error",
                         "error": f"{type(exc).__name__}: {exc}"})

    if image_dir is not None:
        image_dir.mkdir(parents=True, exist_ok=True)
        artifacts.append(export_rir_image(truth, image_dir / f"{cell.tag}_truth.pgm"))
        artifacts.append(export_rir_image(masked_image(truth, mask), image_dir / f"{cell.tag}_masked.pgm"))
        for method, est in estimates.items():
            artifacts.append(export_rir_image(est, image_dir / f"{cell.tag}_{method}.pgm"))
        if missing.size and estimates:
            mic = int(missing[np.argmin(np.abs(missing - 48))])
            curves = {"truth": edc(truth.data[:, mic])}
            curves.update({m: edc(e.data[:, mic]) for m, e in estimates.items() if np.any(e.data[:, mic])})
            artifacts.append(edc_chart(curves, fs, image_dir / f"{cell.tag}_edc_mic{mic}.svg",
                                       title=f"EDC, microphone {mic}"))
    return rows, reports, artifacts


def read_rows(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        return []
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _row_key(row: dict) -> tuple:
    return (float(row["curvature"]), float(row["source_angle_deg"]), float(row["mask_ratio"]),
            int(row["seed"]), row["method"])


def append_rows(path, rows) -> None:
    path = Path(path)
    new = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        if new:
            writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row[k]) for k in CSV_FIELDS})


def make_plots(rows, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    made = []
    for x in ("mask_ratio", "curvature", "source_angle_deg"):
        if len({r[x] for r in rows}) < 2:
            continue
        for metric in ("nmse_db", "cd"):
            made.append(line_chart(rows, x, metric, out_dir / f"{metric}_vs_{x}.svg"))
    return made


def run_experiment(config: ExperimentConfig, inpainter, out_dir=None, *, cells=None, images: bool = True,
                   n_jobs: int = 1) -> ExperimentResult:
    """Evaluate every cell, append rows to ``results.csv`` and draw summary figures.

    Cells whose rows are already present in the CSV are skipped, so a rerun
    resumes an interrupted sweep. Images and EDC plots are written for the
    first seed of each configuration.
    """
    out = Path(out_dir or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    cells = grid_cells(config) if cells is None else list(cells)
    done = {_row_key(r) for r in read_rows(csv_path)}
    todo = [c for c in cells if any((c.curvature, c.angle, c.ratio, c.seed, m) not in done for m in METHODS)]
    first_seed = min(c.seed for c in cells) if cells else 0

    def job(cell):
        img_dir = out / "images" if images and cell.seed == first_seed else None
        return run_cell(config, inpainter, cell, img_dir)

    # Rows are appended as each cell finishes so an interrupted sweep keeps its progress.
    if n_jobs == 1:
        outputs = (job(c) for c in todo)
    else:
        outputs = Parallel(n_jobs=n_jobs, return_as="generator")(delayed(job)(c) for c in todo)

    result = ExperimentResult(csv_path=csv_path)
    for cell, (rows, reports, artifacts) in zip(todo, outputs):
        rows = [r for r in rows if _row_key(r) not in done]
        append_rows(csv_path, rows)
        result.reports.extend(reports)
        result.artifacts.extend(artifacts)
        logger.info("cell %s: %s", cell.tag,
                    ", ".join(f"{r['method']} cd={r['cd']:.3f}" for r in rows if r["status"] == "ok"))
    result.rows = read_rows(csv_path)
    result.artifacts.extend(make_plots(result.rows, out))
    return result


def summarize(rows, by=("mask_ratio",)) -> dict:
    """Median NMSE and CD per (``by`` values, method) over successful rows."""
    groups = {}
    for r in rows:
        if r["status"] != "ok":
            continue
        key = tuple(float(r[b]) for b in by) + (r["method"],)
        groups.setdefault(key, []).append((float(r["nmse_db"]), float(r["cd"])))
    return {k: {"nmse_db": float(np.median([v[0] for v in vals])), "cd": float(np.median([v[1] for v in vals])),
                "n": len(vals)} for k, vals in sorted(groups.items())}


__all__ = ["CSV_FIELDS", "Cell", "EvalReport", "ExperimentResult", "grid_cells", "make_plots",
           "mask_seed", "read_rows", "run_cell", "run_experiment", "summarize"]
