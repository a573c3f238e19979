"""Command line entry point: ``folt <command> ...``.

Exit status: 0 on success, 1 for usage errors (bad flags, unknown config
keys), 2 for runtime and I/O failures.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import evaluation
from .config import TrackerConfig, parse_overrides, read_config_pairs
from .errors import FoltError, InputError, ParameterError
from .postprocess import foreground_mask
from .raster import Region, normalize_to_u8
from .saliency import mbd_saliency
from .sequence_io import (RunArtifacts, load_sequence, parse_groundtruth, read_frame,
                          render_overlay, write_artifacts, write_gray)
from .synthetic import moving_square
from .tracker import localize, prepare_frame, track_sequence

log = logging.getLogger("folt")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
BENCH_TARGET_FPS = 100.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_config_flags(p):
    p.add_argument("--config", type=Path, help="key = value file with tracker parameters")
    group = p.add_argument_group("tracker parameters (override --config)")
    for f in dataclasses.fields(TrackerConfig):
        flag = "--" + f.name.replace("_", "-")
        group.add_argument(flag, dest=f"cfg_{f.name}", metavar=f.name.upper(), default=None,
                           help=f"default {getattr(TrackerConfig(), f.name)}")


def _config(args) -> TrackerConfig:
    try:
        values = read_config_pairs(args.config) if args.config else {}
        flags = {f.name: getattr(args, f"cfg_{f.name}") for f in dataclasses.fields(TrackerConfig)}
        values.update(parse_overrides({k: v for k, v in flags.items() if v is not None}))
        return TrackerConfig(**values)
    except (InputError, ParameterError) as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="folt", description="Salient object localization and tracking.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("detect", help="export the full-image saliency map")
    p.add_argument("image", type=Path)
    p.add_argument("--out", type=Path, default=Path("saliency.png"))
    p.add_argument("--mask", type=Path, help="also write the dilated foreground mask")
    _add_config_flags(p)

    p = sub.add_parser("track", help="track a frame sequence")
    p.add_argument("sequence", type=Path)
    p.add_argument("--gt", type=Path, help="ground truth file (x,y,w,h per line)")
    p.add_argument("--out", type=Path, default=Path("folt_out"))
    p.add_argument("--overlay", action="store_true", help="write annotated frames")
    p.add_argument("--pattern", default="*.jpg|*.png")
    p.add_argument("--timings", action="store_true", help="fill the ms column of results.csv")
    _add_config_flags(p)

    p = sub.add_parser("eval-ope", help="one-pass evaluation")
    p.add_argument("sequence", type=Path)
    p.add_argument("--gt", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--pattern", default="*.jpg|*.png")
    p.add_argument("--timings", action="store_true")
    _add_config_flags(p)

    p = sub.add_parser("eval-tre", help="temporal robustness evaluation")
    p.add_argument("sequence", type=Path)
    p.add_argument("--gt", type=Path, required=True)
    p.add_argument("--segments", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", type=Path)
    p.add_argument("--pattern", default="*.jpg|*.png")
    _add_config_flags(p)

    p = sub.add_parser("bench", help="throughput on a synthetic sequence")
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--size", default="300x200", help="WIDTHxHEIGHT")
    _add_config_flags(p)
    return parser


def _print_summary(stats: dict):
    for key, value in stats.items():
        print(f"{key}={value:.4f}" if isinstance(value, float) else f"{key}={value}")


def cmd_detect(args) -> int:
    config = _config(args)
    image, _ = prepare_frame(read_frame(args.image), config.max_dim)
    maps = mbd_saliency(image, passes=config.passes)
    full = Region.full(image.shape)
    saliency = normalize_to_u8(maps.D, full)
    write_gray(args.out, saliency)
    if args.mask:
        write_gray(args.mask, foreground_mask(saliency, full, config).astype(np.uint8) * 255)
    box = localize(maps, full, config)
    if box is None:
        print("target=none")
    else:
        x, y, w, h = box.tlwh()
        print(f"target={x:.1f},{y:.1f},{w:.1f},{h:.1f}")
    print(f"saliency={args.out}")
    return EXIT_OK


def _load(args):
    manifest = load_sequence(args.sequence, args.pattern)
    gt_path = args.gt
    truth = None
    if gt_path is not None:
        truth = parse_groundtruth(gt_path, len(manifest)).boxes()
    return manifest, truth


def cmd_track(args) -> int:
    config = _config(args)
    manifest, truth = _load(args)
    if truth is None and manifest.groundtruth is not None:
        log.info("using ground truth %s", manifest.groundtruth)
        truth = parse_groundtruth(manifest.groundtruth, len(manifest)).boxes()
    results = track_sequence(manifest.loaders(), config)
    summary = evaluation.summarize(results, truth) if truth is not None else None
    artifacts = RunArtifacts(results, truth, summary, timings=args.timings)
    write_artifacts(artifacts, args.out)
    if args.overlay:
        for i, (path, result) in enumerate(zip(manifest.frames, results)):
            render_overlay(read_frame(path), result, truth[i] if truth else None,
                           args.out / "overlay" / f"{path.stem}.png")
    tracked = sum(r.tracking for r in results)
    print(f"sequence={manifest.name} frames={len(results)} tracked={tracked} out={args.out}")
    if summary is not None:
        _print_summary(summary.as_dict())
    return EXIT_OK


def cmd_eval_ope(args) -> int:
    config = _config(args)
    manifest, truth = _load(args)
    frames = manifest.read_all()
    summary, results = evaluation.run_ope(frames, truth, config)
    if args.out:
        write_artifacts(RunArtifacts(results, truth, summary, timings=args.timings), args.out)
    _print_summary(summary.as_dict())
    return EXIT_OK


def cmd_eval_tre(args) -> int:
    config = _config(args)
    manifest, truth = _load(args)
    frames = manifest.read_all()
    try:
        tre = evaluation.run_tre(frames, truth, config, args.segments, args.seed)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        segments = ["start,precision_20,success_050,cle_mean,auc"]
        for start, part in zip(tre.starts, tre.segments):
            segments.append(f"{start},{part.precision_20:.4f},{part.success_050:.4f},"
                            f"{part.cle_mean:.4f},{part.auc:.4f}")
        write_artifacts(RunArtifacts(None, None, tre.summary,
                                     extra_summary={"segments": len(tre.starts)}), args.out)
        with open(args.out / "tre_segments.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(segments) + "\n")
    stats = tre.summary.as_dict()
    stats["segments"] = len(tre.starts)
    _print_summary(stats)
    return EXIT_OK


def _parse_size(text: str):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--size must look like 300x200, got {text!r}") from None
    if w < 8 or h < 8:
        raise UsageError("--size must be at least 8x8")
    return w, h


def cmd_bench(args) -> int:
    config = _config(args)
    width, height = _parse_size(args.size)
    if args.frames < 1:
        raise UsageError("--frames must be >= 1")
    side = max(4, min(width, height) // 10)
    margin = side
    travel = max(0, width - side - 2 * margin)
    vx = travel / max(args.frames - 1, 1)
    vy = max(0, height - side - 2 * margin) / max(args.frames - 1, 1)
    seq = moving_square(args.frames, (width, height), side, (margin, margin), (vx, vy), seed=0)
    track_sequence(seq.frames[:2], config)    # JIT warm-up
    results = track_sequence(seq.frames, config)
    fps = evaluation.throughput(results)
    summary = evaluation.summarize(results, seq.truth)
    print(f"frames={len(results)} size={width}x{height}")
    print(f"fps_median={fps.median:.1f}")
    print(f"fps_mean={fps.mean:.1f}")
    print(f"precision_20={summary.precision_20:.4f}")
    if fps.median < BENCH_TARGET_FPS:
        print(f"warning: median throughput below {BENCH_TARGET_FPS:.0f} fps", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "track": cmd_track,
    "eval-ope": cmd_eval_ope,
    "eval-tre": cmd_eval_tre,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FoltError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
