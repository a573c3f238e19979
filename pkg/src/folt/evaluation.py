"""One-pass (OPE) and temporal-robustness (TRE) evaluation.

Conventions shared by every metric here:

* frames whose ground truth is absent are left out of the denominators;
* a frame where the tracker reports lost while the target is visible
  counts as a miss (center error infinite, overlap 0);
* precision uses ``cle < threshold`` and success uses ``iou > theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import TrackerConfig
from .errors import InputError
from .raster import BoundingBox
from .tracker import FrameResult, track_sequence

PRECISION_GRID = np.arange(51, dtype=np.float64)          # 0..50 px
SUCCESS_GRID = np.round(np.arange(21) * 0.05, 10)         # 0, 0.05, .., 1
PRECISION_THRESHOLD = 20.0
SUCCESS_THRESHOLD = 0.5


def cle(predicted: BoundingBox, truth: BoundingBox) -> float:
    """Euclidean distance between box centers."""
    return math.hypot(predicted.cx - truth.cx, predicted.cy - truth.cy)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    ix = min(a.right, b.right) - max(a.left, b.left)
    iy = min(a.bottom, b.bottom) - max(a.top, b.top)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    # edge arithmetic can leave inter a hair above the true area
    return min(inter / (a.w * a.h + b.w * b.h - inter), 1.0)


def _boxes(results) -> list:
    out = []
    for r in results:
        out.append(r.box if isinstance(r, FrameResult) else r)
    return out


def frame_errors(results, truth: Sequence[Optional[BoundingBox]]):
    """Per-frame ``(cle, iou)`` arrays over the frames with visible truth.

    ``results`` holds ``FrameResult`` objects or bare boxes (``None`` for
    lost frames).
    """
    predicted = _boxes(results)
    if len(predicted) != len(truth):
        raise InputError(f"{len(predicted)} results for {len(truth)} ground-truth frames")
    errors, overlaps = [], []
    for box, gt in zip(predicted, truth):
        if gt is None:
            continue
        if box is None:
            errors.append(math.inf)
            overlaps.append(0.0)
        else:
            errors.append(cle(box, gt))
            overlaps.append(iou(box, gt))
    return np.array(errors, dtype=np.float64), np.array(overlaps, dtype=np.float64)


def _fraction(flags: np.ndarray) -> float:
    return float(flags.mean()) if flags.size else 0.0


def precision_at(results, truth, threshold: float = PRECISION_THRESHOLD) -> float:
    errors, _ = frame_errors(results, truth)
    return _fraction(errors < threshold)


def success_at(results, truth, theta: float = SUCCESS_THRESHOLD) -> float:
    _, overlaps = frame_errors(results, truth)
    return _fraction(overlaps > theta)


@dataclass
class MetricCurve:
    thresholds: np.ndarray
    values: np.ndarray

    def rows(self):
        return list(zip(self.thresholds.tolist(), self.values.tolist()))


def curves(results, truth):
    """Precision curve (0..50 px), success curve (0..1 by 0.05) and the
    success AUC (mean of the success curve)."""
    errors, overlaps = frame_errors(results, truth)
    if errors.size:
        prec = (errors[None, :] < PRECISION_GRID[:, None]).mean(axis=1)
        succ = (overlaps[None, :] > SUCCESS_GRID[:, None]).mean(axis=1)
    else:
        prec = np.zeros_like(PRECISION_GRID)
        succ = np.zeros_like(SUCCESS_GRID)
    return MetricCurve(PRECISION_GRID.copy(), prec), MetricCurve(SUCCESS_GRID.copy(), succ), float(succ.mean())


@dataclass
class FpsStats:
    median: float
    mean: float
    median_total: float = float("nan")
    mean_total: float = float("nan")


def _fps(ms: np.ndarray):
    ms = ms[np.isfinite(ms)]
    if ms.size == 0 or ms.sum() <= 0:
        return float("nan"), float("nan")
    median_ms = float(np.median(ms))
    median = 1000.0 / median_ms if median_ms > 0 else float("inf")
    return median, 1000.0 * ms.size / float(ms.sum())


def throughput(results: Sequence[FrameResult]) -> FpsStats:
    """Frames per second from per-frame timings.

    ``median`` is the reciprocal of the median frame time, ``mean`` is
    frames over total time. The ``*_total`` pair includes decoding.
    """
    ms = np.array([r.ms for r in results], dtype=np.float64)
    total = np.array([r.ms_total for r in results], dtype=np.float64)
    median, mean = _fps(ms)
    median_t, mean_t = _fps(total)
    return FpsStats(median, mean, median_t, mean_t)


@dataclass
class EvalSummary:
    precision_20: float
    success_050: float
    cle_mean: float
    auc: float
    fps: FpsStats
    frames: int
    precision_curve: MetricCurve = field(repr=False, default=None)
    success_curve: MetricCurve = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {
            "frames": self.frames,
            "precision_20": self.precision_20,
            "success_050": self.success_050,
            "cle_mean": self.cle_mean,
            "auc": self.auc,
            "fps_median": self.fps.median,
            "fps_mean": self.fps.mean,
            "fps_total_median": self.fps.median_total,
            "fps_total_mean": self.fps.mean_total,
        }


def summarize(results: Sequence[FrameResult], truth) -> EvalSummary:
    """Metrics of one tracker run against aligned ground truth.

    ``cle_mean`` averages over frames where both boxes exist (NaN if none).
    """
    errors, _ = frame_errors(results, truth)
    prec_curve, succ_curve, auc = curves(results, truth)
    finite = errors[np.isfinite(errors)]
    return EvalSummary(
        precision_20=precision_at(results, truth, PRECISION_THRESHOLD),
        success_050=success_at(results, truth, SUCCESS_THRESHOLD),
        cle_mean=float(finite.mean()) if finite.size else float("nan"),
        auc=auc,
        fps=throughput(results),
        frames=len(results),
        precision_curve=prec_curve,
        success_curve=succ_curve,
    )


def _check_inputs(frames, truth):
    if len(truth) == 0:
        raise InputError("ground truth is empty")
    if len(frames) == 0:
        raise InputError("sequence has no frames")
    if len(frames) != len(truth):
        raise InputError(f"{len(frames)} frames but {len(truth)} ground-truth entries")


def run_ope(frames: Sequence, truth, config: TrackerConfig = TrackerConfig()):
    """Track from the first frame to the last and score the run.

    Returns ``(EvalSummary, results)``.
    """
    _check_inputs(frames, truth)
    results = track_sequence(frames, config)
    return summarize(results, truth), results


def tre_starts(length: int, segments: int = 20, seed: int = 7) -> list[int]:
    """Sorted 1-based start frames: frame 1 plus ``segments - 1`` distinct
    others drawn uniformly with a generator seeded by ``seed``."""
    if segments < 1:
        raise InputError(f"segments must be >= 1, got {segments}")
    if segments > length:
        raise InputError(f"{segments} segments requested for a {length}-frame sequence")
    rng = np.random.default_rng(seed)
    others = rng.choice(np.arange(2, length + 1), size=segments - 1, replace=False)
    return [1] + sorted(int(s) for s in others)


def _mean_summary(parts: list[EvalSummary]) -> EvalSummary:
    if len(parts) == 1:
        return parts[0]

    def avg(values):
        values = np.array(values, dtype=np.float64)
        values = values[np.isfinite(values)]
        return float(values.mean()) if values.size else float("nan")

    prec = MetricCurve(PRECISION_GRID.copy(), np.mean([p.precision_curve.values for p in parts], axis=0))
    succ = MetricCurve(SUCCESS_GRID.copy(), np.mean([p.success_curve.values for p in parts], axis=0))
    fps = FpsStats(*(avg([getattr(p.fps, k) for p in parts])
                     for k in ("median", "mean", "median_total", "mean_total")))
    return EvalSummary(
        precision_20=avg([p.precision_20 for p in parts]),
        success_050=avg([p.success_050 for p in parts]),
        cle_mean=avg([p.cle_mean for p in parts]),
        auc=avg([p.auc for p in parts]),
        fps=fps,
        frames=sum(p.frames for p in parts),
        precision_curve=prec,
        success_curve=succ,
    )


@dataclass
class TreResult:
    summary: EvalSummary
    starts: list
    segments: list       # EvalSummary per start frame


def run_tre(frames: Sequence, truth, config: TrackerConfig = TrackerConfig(),
            segments: int = 20, seed: int = 7) -> TreResult:
    """Run the tracker from several start frames to the end; each segment
    is scored against its own ground-truth suffix and segments are
    averaged with equal weight."""
    _check_inputs(frames, truth)
    starts = tre_starts(len(frames), segments, seed)
    parts = []
    for start in starts:
        results = track_sequence(frames[start - 1:], config)
        parts.append(summarize(results, truth[start - 1:]))
    return TreResult(_mean_summary(parts), starts, parts)
