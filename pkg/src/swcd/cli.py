"""Command-line interface.

Exit codes: 0 success, 1 usage/configuration error, 2 IO or format error,
3 numerical failure. Every run emits a JSON run manifest echoing the
effective configuration (written to --manifest if given, else to stderr;
`bench` also drops run_manifest.json into its output directory).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .evaluation import DegenerateInputError, load_manifest, run_benchmark
from .imgio import ImageFormatError, load_image, resize_bilinear, save_image, save_map_png, save_map_raw
from .metric import SlicedWassersteinColorDistance
from .optim import OptimConfig, color_transfer, gaussian_noise_image, recover_reference, transfer_video
from .pyramid import PyramidUnderflowError

_FRAME_EXTS = (".png", ".ppm", ".pgm", ".pnm")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; contract wants 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="projection-set seed")
    parser.add_argument("--scales", type=int, default=5, help="pyramid levels (default 5)")
    parser.add_argument("--projections", type=int, default=128,
                        help="random unit projections (default 128)")
    parser.add_argument("--patch-side", type=int, default=11,
                        help="odd projection kernel side (default 11)")
    parser.add_argument("--no-lab", action="store_true",
                        help="compare raw sRGB values instead of CIELAB")
    parser.add_argument("--size", type=int, default=256,
                        help="resize inputs to SIZE x SIZE before scoring; 0 keeps native size")
    parser.add_argument("--manifest", default=None,
                        help="write the run manifest JSON here instead of stderr")


def build_parser() -> _Parser:
    parser = _Parser(prog="swcd", description="Perceptual color difference via "
                     "multiscale sliced Wasserstein distances")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[], help="print the color difference of two images")
    p.add_argument("image_a")
    p.add_argument("image_b")
    _add_common(p)

    p = sub.add_parser("map", help="write the spatial color-difference map")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--out", required=True, help="colormapped 8-bit PNG output")
    p.add_argument("--raw", default=None, help="optional raw float32 map output")
    _add_common(p)

    p = sub.add_parser("recover", help="rebuild a reference image by descent from an initialization")
    p.add_argument("reference")
    p.add_argument("--init", default="noise", help="noise | black | path to an image")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--log", default=None, help="trajectory log path")
    _add_common(p)

    p = sub.add_parser("transfer", help="transfer the color appearance of SRC onto TARGET")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--log", default=None)
    _add_common(p)

    p = sub.add_parser("transfer-video", help="frame-wise color transfer with warm starts")
    p.add_argument("source")
    p.add_argument("frame_dir")
    p.add_argument("--out", required=True, help="output directory for recolored frames")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("bench", help="run a manifest benchmark and write scores + summary")
    p.add_argument("manifest_csv")
    p.add_argument("--augment", choices=["none", "translate", "dilate", "flip"], default="none")
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)

    p = sub.add_parser("timeit", help="report per-evaluation milliseconds")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--repeats", type=int, default=10)
    _add_common(p)
    return parser


def _metric_from(args) -> SlicedWassersteinColorDistance:
    return SlicedWassersteinColorDistance(
        scales=args.scales, patch_side=args.patch_side, projections=args.projections,
        seed=args.seed, convert_to_lab=not args.no_lab)


def _load_sized(path, size: int) -> np.ndarray:
    img = load_image(path)
    if size:
        if size < 16:
            raise ValueError("--size must be 0 (native) or >= 16")
        img = resize_bilinear(img, size, size)
    return img


def _optim_config(args) -> OptimConfig:
    cfg = OptimConfig(seed=args.seed)
    if args.steps is not None:
        cfg.step_count = args.steps
    if args.lr is not None:
        cfg.learning_rate = args.lr
    return cfg


def _optim_echo(cfg: OptimConfig) -> dict:
    return {"step_count": cfg.step_count, "learning_rate": cfg.learning_rate,
            "lr_schedule": cfg.lr_schedule, "optimizer": cfg.optimizer,
            "variable_space": cfg.variable_space,
            "resample_projections_every": cfg.resample_projections_every}


def _emit_manifest(args, metric, extra: dict, started: float) -> None:
    manifest = {
        "command": args.command,
        "config": dict(sorted(metric.get_params().items())),
        "fingerprint": metric.fingerprint(),
        "size": args.size if hasattr(args, "size") else None,
        **extra,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    line = json.dumps(manifest, sort_keys=False)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(line + "\n")
    else:
        print(line, file=sys.stderr)
    if args.command == "bench":
        with open(os.path.join(args.out, "run_manifest.json"), "w", encoding="utf-8") as fh:
            fh.write(line + "\n")


def _run(args) -> int:
    started = time.perf_counter()
    metric = _metric_from(args)

    if args.command == "score":
        a = _load_sized(args.image_a, args.size)
        b = _load_sized(args.image_b, args.size)
        value = metric.distance(a, b)
        print(f"{value:.9g}")
        _emit_manifest(args, metric, {"inputs": [args.image_a, args.image_b]}, started)
        return 0

    if args.command == "map":
        a = _load_sized(args.image_a, args.size)
        b = _load_sized(args.image_b, args.size)
        cdmap = metric.distance_map(a, b)
        save_map_png(args.out, cdmap.data)
        outputs = [args.out]
        if args.raw:
            save_map_raw(args.raw, cdmap.data)
            outputs.append(args.raw)
        print(f"{cdmap.value:.9g}")
        _emit_manifest(args, metric, {"inputs": [args.image_a, args.image_b],
                                      "outputs": outputs}, started)
        return 0

    if args.command == "recover":
        ref = _load_sized(args.reference, args.size)
        if args.init == "noise":
            start_img = gaussian_noise_image(ref.shape[0], ref.shape[1], seed=args.seed)
        elif args.init == "black":
            start_img = np.zeros_like(ref)
        else:
            start_img = _load_sized(args.init, args.size)
        cfg = _optim_config(args)
        result = recover_reference(ref, start_img, metric, cfg, log_path=args.log)
        save_image(args.out, result.image)
        print(f"{result.scores[0]:.9g} -> {result.scores[-1]:.9g}"
              f"{' (aborted)' if result.aborted else ''}")
        _emit_manifest(args, metric, {
            "inputs": [args.reference], "init": args.init, "outputs": [args.out],
            "optim": _optim_echo(cfg),
            "log": args.log, "aborted": result.aborted}, started)
        return 3 if result.aborted else 0

    if args.command == "transfer":
        src = _load_sized(args.source, args.size)
        tgt = _load_sized(args.target, args.size)
        cfg = _optim_config(args)
        result = color_transfer(src, tgt, metric, cfg, log_path=args.log)
        save_image(args.out, result.image)
        print(f"{result.scores[0]:.9g} -> {result.scores[-1]:.9g}"
              f"{' (aborted)' if result.aborted else ''}")
        _emit_manifest(args, metric, {
            "inputs": [args.source, args.target], "outputs": [args.out],
            "optim": _optim_echo(cfg),
            "log": args.log, "aborted": result.aborted}, started)
        return 3 if result.aborted else 0

    if args.command == "transfer-video":
        src = _load_sized(args.source, args.size)
        names = sorted(n for n in os.listdir(args.frame_dir)
                       if os.path.splitext(n)[1].lower() in _FRAME_EXTS)
        if not names:
            raise ImageFormatError(f"{args.frame_dir}: no PNG/PPM frames found")
        frames = [_load_sized(os.path.join(args.frame_dir, n), args.size) for n in names]
        cfg = _optim_config(args)
        os.makedirs(args.out, exist_ok=True)
        outputs = []
        for name, out_img in zip(names, transfer_video(src, frames, metric, cfg)):
            out_path = os.path.join(args.out, os.path.splitext(name)[0] + ".png")
            save_image(out_path, out_img)
            outputs.append(out_path)
        print(f"{len(outputs)} frames written")
        _emit_manifest(args, metric, {
            "inputs": [args.source, args.frame_dir], "outputs": outputs,
            "optim": _optim_echo(cfg)}, started)
        return 0

    if args.command == "bench":
        records = load_manifest(args.manifest_csv)
        os.makedirs(args.out, exist_ok=True)
        summaries = run_benchmark(records, metric, augmentation=args.augment,
                                  out_dir=args.out, size=args.size)
        for tag in ("aligned", "non_aligned", "unknown", "all"):
            if tag in summaries:
                s = summaries[tag]
                print(f"{tag}: stress={s.stress:.3f} plcc={s.plcc:.3f} srcc={s.srcc:.3f} "
                      f"pairs={s.pair_count}")
        _emit_manifest(args, metric, {"inputs": [args.manifest_csv], "augment": args.augment,
                                      "outputs": [os.path.join(args.out, "scores.csv"),
                                                  os.path.join(args.out, "summary.json")]},
                       started)
        return 0

    if args.command == "timeit":
        a = _load_sized(args.image_a, args.size)
        b = _load_sized(args.image_b, args.size)
        if args.repeats < 1:
            raise ValueError("--repeats must be >= 1")
        metric.distance(a, b)  # warm caches before timing
        t0 = time.perf_counter()
        for _ in range(args.repeats):
            metric.distance(a, b)
        ms = (time.perf_counter() - t0) * 1000.0 / args.repeats
        print(f"{ms:.3f}")
        _emit_manifest(args, metric, {"inputs": [args.image_a, args.image_b],
                                      "repeats": args.repeats, "mean_ms": round(ms, 3)}, started)
        return 0

    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ImageFormatError, OSError) as exc:
        print(f"swcd: {exc}", file=sys.stderr)
        return 2
    except (DegenerateInputError, FloatingPointError) as exc:
        print(f"swcd: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (PyramidUnderflowError, ValueError) as exc:
        print(f"swcd: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
