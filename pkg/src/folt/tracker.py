"""Fast object localization and tracking loop.

Each frame: Kalman prediction, MBD saliency update in the search region
around the predicted box, box extraction from the saliency map, Kalman
correction. The whole saliency map is recomputed every
``refresh_interval`` frames; while the target is lost those refresh
frames also run a full-image re-detection.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kalman
from .config import TrackerConfig
from .errors import DimensionError, InputError
from .postprocess import detect_target
from .raster import (BoundingBox, Region, ScaleTransform, expand_region,
                     normalize_to_u8, resize_max_dim, to_luma)
from .saliency import DistanceMaps, local_update, mbd_saliency

log = logging.getLogger(__name__)

TRACKING = "tracking"
LOST = "lost"


@dataclass
class TrackerState:
    state: np.ndarray            # (x, y, u, v, w, h) in working pixels
    cov: np.ndarray
    maps: DistanceMaps
    frame_index: int             # 1-based number of the last processed frame
    since_refresh: int
    status: str
    scale: ScaleTransform
    source_shape: tuple          # (height, width) of the original frames
    model: kalman.KalmanModel

    @property
    def working_shape(self):
        return self.maps.shape


@dataclass(frozen=True)
class FrameResult:
    frame: int
    box: Optional[BoundingBox]   # original-resolution coordinates
    status: str
    ms: float                    # algorithm time, excludes decoding
    ms_total: float = float("nan")

    @property
    def tracking(self) -> bool:
        return self.status == TRACKING


def prepare_frame(frame, max_dim: int):
    """Single-channel working image plus the transform back to ``frame``."""
    frame = np.asarray(frame)
    if frame.ndim == 3 and frame.shape[2] == 1:
        frame = frame[:, :, 0]
    if frame.ndim == 2:
        gray = frame if frame.dtype == np.uint8 else np.clip(frame, 0, 255).astype(np.uint8)
    elif frame.ndim == 3 and frame.shape[2] in (3, 4):
        gray = to_luma(frame[:, :, :3])
    else:
        raise InputError(f"cannot interpret frame of shape {frame.shape}")
    return resize_max_dim(gray, max_dim)


def background_level(D: np.ndarray, region: Region) -> float:
    """Median distance of a strided sample of the map outside ``region``
    (the whole map when too little lies outside)."""
    sample = D[::2, ::2]
    keep = np.isfinite(sample)
    outside = keep.copy()
    outside[(region.y0 + 1) // 2:(region.y1 + 1) // 2, (region.x0 + 1) // 2:(region.x1 + 1) // 2] = False
    if outside.sum() >= 16:
        keep = outside
    return float(np.median(sample[keep])) if keep.any() else 0.0


def localize(maps: DistanceMaps, region: Region, config: TrackerConfig) -> Optional[BoundingBox]:
    """Box of the salient target in ``region``, in working pixels.

    Two contrast gates reject detections in flat or noise-only regions:
    the raw distance peak in the region, and the mean raw distance of the
    chosen blob over the background level, must reach ``min_contrast``.
    """
    raw = maps.D[region.slices]
    finite = raw[np.isfinite(raw)]
    if finite.size == 0 or finite.max() < config.min_contrast:
        return None
    D = maps.D
    if finite.size != raw.size:
        D = np.where(np.isfinite(D), D, finite.max())
    found = detect_target(normalize_to_u8(D, region), region, config)
    if found is None:
        return None
    if found.core.any():
        contrast = D[found.core].mean() - background_level(D, region)
        if contrast < config.min_contrast:
            return None
    return found.box


def _model(config: TrackerConfig) -> kalman.KalmanModel:
    return kalman.KalmanModel.from_diagonals(config.q_diag, config.r_diag)


def _report(state: TrackerState, status: str) -> Optional[BoundingBox]:
    if status != TRACKING:
        return None
    height, width = state.working_shape
    box = kalman.box_from_state(state.state).clip(width, height)
    src_h, src_w = state.source_shape
    return state.scale.to_original(box).clip(src_w, src_h)


def initialize(first_frame, config: TrackerConfig = TrackerConfig()):
    """Detect the target on the whole first frame and start the filter.

    Returns ``(TrackerState, FrameResult)``. When nothing salient is found
    the filter starts at the image center and the status is lost.
    """
    start = time.perf_counter()
    frame = np.asarray(first_frame)
    image, scale = prepare_frame(frame, config.max_dim)
    model = _model(config)
    full = Region.full(image.shape)
    maps = mbd_saliency(image, full, passes=config.passes)
    box = localize(maps, full, config)
    if box is not None:
        status = TRACKING
    else:
        status = LOST
        height, width = image.shape
        box = BoundingBox(width / 2, height / 2, max(width / 4, 1.0), max(height / 4, 1.0))
    state, cov = kalman.init_filter(box, model)
    tracker = TrackerState(state, cov, maps, 1, 0, status, scale, frame.shape[:2], model)
    result = FrameResult(1, _report(tracker, status), status,
                         (time.perf_counter() - start) * 1e3)
    return tracker, result


def process_frame(tracker: TrackerState, frame, config: TrackerConfig = TrackerConfig()):
    """Advance ``tracker`` by one frame; returns ``(TrackerState, FrameResult)``.

    The input state is not modified.
    """
    start = time.perf_counter()
    frame = np.asarray(frame)
    if frame.shape[:2] != tuple(tracker.source_shape):
        raise DimensionError(f"frame {frame.shape[:2]} differs from first frame {tracker.source_shape}")
    image, _ = prepare_frame(frame, config.max_dim)
    height, width = image.shape
    model = tracker.model

    prior_state, prior_cov = kalman.predict(tracker.state, tracker.cov, model)
    search = expand_region(kalman.box_from_state(prior_state), config.delta, (width, height))

    since_refresh = tracker.since_refresh + 1
    refresh = since_refresh >= config.refresh_interval
    if refresh:
        maps = mbd_saliency(image, passes=config.passes)
        since_refresh = 0
    else:
        maps = local_update(tracker.maps, image, search, config.passes)

    box = localize(maps, search, config)
    if box is not None:
        state, cov = kalman.correct(prior_state, prior_cov, kalman.measurement_from_box(box), model)
        status = TRACKING
    else:
        state, cov = prior_state, prior_cov
        status = LOST

    if status == LOST and refresh:
        box = localize(maps, Region.full(image.shape), config)
        if box is not None:
            log.debug("frame %d: re-acquired target at %s", tracker.frame_index + 1, box)
            state, cov = kalman.init_filter(box, model)
            status = TRACKING

    updated = TrackerState(state, cov, maps, tracker.frame_index + 1, since_refresh, status,
                           tracker.scale, tracker.source_shape, model)
    result = FrameResult(updated.frame_index, _report(updated, status), status,
                         (time.perf_counter() - start) * 1e3)
    return updated, result


def track_sequence(frames: Iterable, config: TrackerConfig = TrackerConfig()) -> list[FrameResult]:
    """Run the tracker over ``frames``.

    ``frames`` may be arrays or zero-argument callables that load one
    (decoding time then shows up only in ``ms_total``).
    """
    results = []
    tracker = None
    for item in frames:
        t0 = time.perf_counter()
        frame = item() if callable(item) else item
        if tracker is None:
            tracker, result = initialize(frame, config)
        else:
            tracker, result = process_frame(tracker, frame, config)
        total = (time.perf_counter() - t0) * 1e3
        results.append(FrameResult(result.frame, result.box, result.status, result.ms, total))
    if tracker is None:
        raise InputError("sequence has no frames")
    return results
