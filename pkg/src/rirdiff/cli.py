"""Command line interface: ``rirdiff <subcommand> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import typing
from pathlib import Path

import numpy as np

from .baseline import sci_interpolate
from .diffusion import DiffusionInpainter
from .harness import ExperimentConfig, build_training_set, run_experiment
from .harness.experiment import make_plots, read_rows, summarize
from .harness.io import export_rir_image, read_mask, read_rirb, write_rirb
from .imaging import Mask, make_mask
from .metrics import evaluate
from .room_sim import make_arc_array, reflection_coeff_for_t60, simulate_matrix, source_at_angle

logger = logging.getLogger("rirdiff")

_LIST_TYPES = {"room_dims": float, "train_curvatures": float, "train_angles": float, "curvatures": float,
               "source_angles": float, "mask_ratios": float, "seeds": int}


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("experiment config (each flag overrides the --config file)")
    g.add_argument("--config", type=Path, help="JSON config file")
    hints = typing.get_type_hints(ExperimentConfig)
    for f in dataclasses.fields(ExperimentConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name in _LIST_TYPES:
            g.add_argument(flag, dest=f.name, type=_LIST_TYPES[f.name], nargs="+", default=None)
        elif hints[f.name] is bool:
            g.add_argument(flag, dest=f.name, type=lambda s: s.lower() in ("1", "true", "yes"), default=None)
        else:
            g.add_argument(flag, dest=f.name, type=hints[f.name], default=None)


def _config(args) -> ExperimentConfig:
    overrides = {f.name: getattr(args, f.name) for f in dataclasses.fields(ExperimentConfig)
                 if getattr(args, f.name, None) is not None}
    if args.config is not None:
        base = json.loads(Path(args.config).read_text())
        base.update(overrides)
        return ExperimentConfig.from_dict(base)
    return ExperimentConfig.for_profile(overrides.pop("profile", "full"), **overrides)


def _add_mask_flags(p):
    p.add_argument("--mask", type=Path, help="JSON file with a mask (or a sidecar containing one)")
    p.add_argument("--mask-ratio", type=float, help="fraction of microphones to drop")
    p.add_argument("--mask-seed", type=int, default=0)


def _mask(args, n_mics: int) -> Mask:
    if args.mask is not None:
        return read_mask(args.mask)
    if args.mask_ratio is None:
        raise SystemExit("either --mask or --mask-ratio is required")
    return make_mask(n_mics, args.mask_ratio, args.mask_seed)


def cmd_simulate(args):
    cfg = _config(args)
    base = cfg.room()
    t60 = args.t60 if args.t60 is not None else cfg.t60_infer
    beta = reflection_coeff_for_t60(base, t60)
    room = base.with_reflection(beta)
    array = make_arc_array(cfg.n_mics, args.curvature, room)
    source = source_at_angle(room, array, args.angle)
    n = args.samples or cfg.k_infer
    M = simulate_matrix(room, source, array, n)
    write_rirb(args.out, M, beta=beta, t60_target=t60, seed=None)
    print(f"wrote {args.out} ({n} samples x {array.n_mics} mics, beta={beta:.4f})")


def cmd_dataset(args):
    cfg = _config(args)
    ts = build_training_set(cfg, args.seed)
    np.savez_compressed(args.out, patches=ts.patches.astype(np.float32))
    Path(args.out).with_suffix(".json").write_text(json.dumps(
        {"fingerprint": ts.fingerprint, "seed": args.seed, "realization": ts.realization,
         "config": cfg.to_dict()}, indent=2) + "\n")
    print(f"wrote {len(ts)} patches to {args.out} (fingerprint {ts.fingerprint})")


def _load_patches(path) -> np.ndarray:
    with np.load(path) as z:
        return z["patches"]


def cmd_train(args):
    cfg = _config(args)
    patches = _load_patches(args.dataset) if args.dataset else build_training_set(cfg, args.seed).patches
    est = DiffusionInpainter(**cfg.inpainter_params(), random_state=args.seed).fit(patches)
    est.save(args.out)
    print(f"trained {est.n_epochs} epochs, final loss {est.loss_curve_[-1]:.5f}; wrote {args.out}")


def _inpainter(args) -> DiffusionInpainter:
    overrides = {}
    if getattr(args, "jump_length", None):
        overrides["jump_length"] = args.jump_length
    if getattr(args, "n_resamples", None):
        overrides["n_resamples"] = args.n_resamples
    return DiffusionInpainter.load(args.checkpoint, **overrides)


def cmd_inpaint(args):
    M = read_rirb(args.input)
    mask = _mask(args, M.n_mics)
    est = _inpainter(args).inpaint(M, mask, seed=args.seed)
    write_rirb(args.out, est, mask=mask.to_dict(), method="diffusion", seed=args.seed)
    print(f"wrote {args.out} ({mask.n_missing} of {mask.n_mics} microphones inpainted)")


def cmd_baseline(args):
    M = read_rirb(args.input)
    mask = _mask(args, M.n_mics)
    est = sci_interpolate(M, mask)
    write_rirb(args.out, est, mask=mask.to_dict(), method="sci")
    print(f"wrote {args.out} ({mask.n_missing} of {mask.n_mics} microphones interpolated)")


def cmd_evaluate(args):
    truth = read_rirb(args.truth)
    est = read_rirb(args.estimate)
    mask = read_mask(args.mask) if args.mask else Mask.from_dict(est.meta["mask"])
    rep = evaluate(truth, est, mask.missing, method=est.meta.get("method", ""))
    text = json.dumps(rep.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text if args.verbose else f"NMSE {rep.nmse_db:.2f} dB, CD {rep.cd:.4f} over {mask.n_missing} mics")


def cmd_sweep(args):
    cfg = _config(args)
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.to_json(out / "config.json")
    if args.checkpoint and Path(args.checkpoint).exists():
        est = DiffusionInpainter.load(args.checkpoint, jump_length=cfg.jump_length,
                                      n_resamples=cfg.n_resamples)
    else:
        ts = build_training_set(cfg, args.seed)
        est = DiffusionInpainter(**cfg.inpainter_params(), random_state=args.seed).fit(ts.patches)
        est.save(args.checkpoint or out / "model.ckpt")
    res = run_experiment(cfg, est, out, n_jobs=args.jobs)
    for key, val in summarize(res.rows, by=("mask_ratio",)).items():
        print(key, f"NMSE {val['nmse_db']:.2f} dB  CD {val['cd']:.3f}  (n={val['n']})")


def cmd_plot(args):
    rows = read_rows(args.csv)
    if not rows:
        raise SystemExit(f"no rows in {args.csv}")
    out = Path(args.out or Path(args.csv).parent)
    out.mkdir(parents=True, exist_ok=True)
    for p in make_plots(rows, out):
        print(f"wrote {p}")


def cmd_export_image(args):
    M = read_rirb(args.input)
    export_rir_image(M, args.out)
    print(f"wrote {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rirdiff", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate an RIR matrix to an RIRB file")
    _add_config_flags(p)
    p.add_argument("--curvature", type=float, default=0.0)
    p.add_argument("--angle", type=float, default=90.0)
    p.add_argument("--t60", type=float, help="target T60 (default: config t60_infer)")
    p.add_argument("--samples", type=int, help="RIR length (default: config k_infer)")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dataset", help="build the training patch set (.npz)")
    _add_config_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("train", help="train the denoiser and write a checkpoint")
    _add_config_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dataset", type=Path, help=".npz from `dataset` (built on the fly if omitted)")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_train)

    for name, func, helptext in (("inpaint", cmd_inpaint, "fill missing microphones with the diffusion model"),
                                 ("baseline", cmd_baseline, "fill missing microphones with cubic splines")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--input", type=Path, required=True)
        p.add_argument("--out", type=Path, required=True)
        _add_mask_flags(p)
        if name == "inpaint":
            p.add_argument("--checkpoint", type=Path, required=True)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--jump-length", type=int)
            p.add_argument("--n-resamples", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("evaluate", help="score an estimate against ground truth")
    p.add_argument("--truth", type=Path, required=True)
    p.add_argument("--estimate", type=Path, required=True)
    p.add_argument("--mask", type=Path, help="mask JSON (default: the estimate's sidecar)")
    p.add_argument("--out", type=Path, help="write the JSON report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="run the experiment grid and write CSV, SVG and PGM outputs")
    _add_config_flags(p)
    p.add_argument("--seed", type=int, required=True, help="training seed")
    p.add_argument("--checkpoint", type=Path, help="reuse this checkpoint (trained and saved here if missing)")
    p.add_argument("--out", type=Path)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="redraw SVG charts from a results CSV")
    p.add_argument("--csv", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("export-image", help="write an RIRB matrix as a 16-bit PGM")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_export_image)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
