"""Frame discovery, ground truth files, run artifacts and overlays."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import cv2
import numpy as np

from .errors import InputError, ParseError
from .raster import BoundingBox

DEFAULT_PATTERN = "*.jpg|*.png"
GROUNDTRUTH_NAMES = ("groundtruth_rect.txt", "groundtruth.txt")
RESULTS_HEADER = ("frame", "status", "x", "y", "w", "h", "cle", "iou", "ms")

PREDICTED_COLOR = (0, 255, 0)    # BGR
TRUTH_COLOR = (0, 0, 255)


def natural_key(name: str):
    """Sort key that orders embedded numbers numerically (``img_2`` < ``img_10``)."""
    parts = re.split(r"(\d+)", name)
    key = tuple((0, int(p), p) if p.isdigit() else (1, 0, p.lower()) for p in parts)
    return key, name


@dataclass
class SequenceManifest:
    name: str
    frames: list                 # Paths in playback order
    groundtruth: Optional[Path] = None

    def __len__(self):
        return len(self.frames)

    def loaders(self):
        """Zero-argument callables that decode each frame on demand."""
        return [(lambda p=p: read_frame(p)) for p in self.frames]

    def read_all(self) -> list:
        return [read_frame(p) for p in self.frames]


def load_sequence(directory, pattern: str = DEFAULT_PATTERN) -> SequenceManifest:
    """Collect frame files in ``directory`` matching any ``|``-separated glob.

    Frames living in an ``img/`` subdirectory (OTB layout) are found too.
    """
    root = Path(directory)
    if not root.is_dir():
        raise OSError(f"not a readable directory: {root}")
    frame_dir = root
    if not _match(root, pattern) and (root / "img").is_dir():
        frame_dir = root / "img"
    frames = sorted(_match(frame_dir, pattern), key=lambda p: natural_key(p.stem))
    if not frames:
        raise InputError(f"no frames matching {pattern!r} in {root}")
    gt = next((root / n for n in GROUNDTRUTH_NAMES if (root / n).is_file()), None)
    return SequenceManifest(root.resolve().name, frames, gt)


def _match(directory: Path, pattern: str) -> list:
    found = set()
    for glob in pattern.split("|"):
        glob = glob.strip()
        if glob:
            found.update(p for p in directory.glob(glob) if p.is_file())
    return list(found)


def read_frame(path) -> np.ndarray:
    """Decode an image file to an RGB ``uint8`` array."""
    bgr = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if bgr is None:
        raise InputError(f"cannot decode image {path}")
    return np.ascontiguousarray(bgr[:, :, ::-1])


@dataclass
class GroundTruthTrack:
    """Per-frame ``(x, y, w, h)`` top-left boxes; NaN rows mark absence."""

    tlwh: np.ndarray

    def __len__(self):
        return len(self.tlwh)

    def present(self, i: int) -> bool:
        return bool(np.all(np.isfinite(self.tlwh[i])))

    def boxes(self) -> list:
        return [BoundingBox.from_tlwh(*row) if self.present(i) else None
                for i, row in enumerate(self.tlwh.tolist())]



def parse_groundtruth(path, frame_count: Optional[int] = None) -> GroundTruthTrack:
    """Read one ``x,y,w,h`` record per line (comma, tab or space separated).

    ``NaN`` fields or the word ``absent`` mark a frame without the target.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise InputError(f"ground truth file {path} is empty")
    rows = []
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if text.lower() == "absent":
            rows.append([math.nan] * 4)
            continue
        fields = [f for f in re.split(r"[,\s]+", text) if f]
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}: {line!r}", lineno, path)
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", lineno, path) from None
        if any(math.isnan(v) for v in values):
            rows.append([math.nan] * 4)
            continue
        if not all(math.isfinite(v) for v in values) or values[2] < 1 or values[3] < 1:
            raise ParseError(f"invalid box {line!r}", lineno, path)
        rows.append(values)
    if frame_count is not None and len(rows) != frame_count:
        raise InputError(f"{path} has {len(rows)} records for {frame_count} frames")
    return GroundTruthTrack(np.array(rows, dtype=np.float64).reshape(-1, 4))


def _exact(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_groundtruth(path, track: GroundTruthTrack):
    lines = []
    for i, row in enumerate(track.tlwh.tolist()):
        lines.append(",".join(_exact(v) for v in row) if track.present(i) else "NaN,NaN,NaN,NaN")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def truth_from_boxes(boxes: Sequence[Optional[BoundingBox]]) -> GroundTruthTrack:
    rows = [list(b.tlwh()) if b is not None else [math.nan] * 4 for b in boxes]
    return GroundTruthTrack(np.array(rows, dtype=np.float64).reshape(-1, 4))


@dataclass
class RunArtifacts:
    results: Optional[list]              # FrameResult per frame; None skips results.csv
    truth: Optional[list] = None         # BoundingBox | None per frame
    summary: Optional[object] = None     # EvalSummary
    extra_summary: dict = field(default_factory=dict)
    timings: bool = False                # fill the ms column (not reproducible)


def _f(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.4f}"


def _write_lines(path: Path, lines):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def results_rows(artifacts: RunArtifacts) -> list:
    from .evaluation import cle, iou
    rows = [",".join(RESULTS_HEADER)]
    for i, r in enumerate(artifacts.results):
        box = r.box
        x = y = w = h = None
        if box is not None:
            x, y, w, h = box.tlwh()
        err = ovl = None
        if artifacts.truth is not None and artifacts.truth[i] is not None:
            gt = artifacts.truth[i]
            err = math.inf if box is None else cle(box, gt)
            ovl = 0.0 if box is None else iou(box, gt)
        ms = r.ms if artifacts.timings else None
        rows.append(",".join([str(r.frame), r.status, _f(x), _f(y), _f(w), _f(h),
                              _f(err), _f(ovl), _f(ms)]))
    return rows


def summary_lines(artifacts: RunArtifacts) -> list:
    stats = {}
    if artifacts.results is not None:
        stats["frames"] = len(artifacts.results)
        stats["tracked_frames"] = sum(r.status == "tracking" for r in artifacts.results)
    if artifacts.summary is not None:
        stats.update(artifacts.summary.as_dict())
    else:
        from .evaluation import throughput
        fps = throughput(artifacts.results)
        stats.update(fps_median=fps.median, fps_mean=fps.mean,
                     fps_total_median=fps.median_total, fps_total_mean=fps.mean_total)
    stats.update(artifacts.extra_summary)
    return [f"{k}={_f(v)}" for k, v in stats.items()]


def write_artifacts(artifacts: RunArtifacts, out_dir) -> list:
    """Write ``results.csv``, the curve CSVs (when scored) and ``summary.txt``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    if artifacts.results is not None:
        written.append(_write_lines(out / "results.csv", results_rows(artifacts)))
    summary = artifacts.summary
    if summary is not None and summary.precision_curve is not None:
        for name, curve in (("precision_curve.csv", summary.precision_curve),
                            ("success_curve.csv", summary.success_curve)):
            lines = ["threshold,value"] + [f"{_f(t)},{_f(v)}" for t, v in curve.rows()]
            written.append(_write_lines(out / name, lines))
    written.append(_write_lines(out / "summary.txt", summary_lines(artifacts)))
    return written


def draw_overlay(frame: np.ndarray, result, truth: Optional[BoundingBox] = None) -> np.ndarray:
    """BGR copy of an RGB ``frame`` with the boxes and status stamped on."""
    canvas = np.ascontiguousarray(np.asarray(frame)[:, :, ::-1]).copy()
    if truth is not None:
        x, y, w, h = truth.tlwh()
        cv2.rectangle(canvas, (int(round(x)), int(round(y))),
                      (int(round(x + w)) - 1, int(round(y + h)) - 1), TRUTH_COLOR, 1)
    if result.box is not None:
        x, y, w, h = result.box.tlwh()
        cv2.rectangle(canvas, (int(round(x)), int(round(y))),
                      (int(round(x + w)) - 1, int(round(y + h)) - 1), PREDICTED_COLOR, 2)
    label = f"#{result.frame} " + ("LOST" if result.box is None else "TRACKING")
    cv2.putText(canvas, label, (4, 14), cv2.FONT_HERSHEY_SIMPLEX, 0.45,
                (0, 0, 255) if result.box is None else PREDICTED_COLOR, 1, cv2.LINE_AA)
    return canvas


def render_overlay(frame: np.ndarray, result, truth: Optional[BoundingBox], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not cv2.imwrite(str(path), draw_overlay(frame, result, truth)):
        raise OSError(f"cannot encode overlay {path}")
    return path


def write_gray(path, image: np.ndarray) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    if not cv2.imwrite(str(path), np.asarray(image, dtype=np.uint8)):
        raise OSError(f"cannot encode image {path}")
    return path
