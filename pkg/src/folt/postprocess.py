"""Saliency map to bounding box: local-mean threshold, dilation, labeling."""
from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from .errors import ParameterError
from .raster import BoundingBox, Region


@dataclass(frozen=True)
class StructuringElement:
    """All-ones rectangle anchored at its center cell."""

    rows: int = 5
    cols: int = 3

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.rows % 2 == 0 or self.cols % 2 == 0:
            raise ParameterError(f"structuring element must have odd extents, got {self.rows}x{self.cols}")

    @property
    def anchor(self):
        return self.rows // 2, self.cols // 2

    def kernel(self) -> np.ndarray:
        return np.ones((self.rows, self.cols), dtype=np.uint8)


@dataclass(frozen=True)
class Component:
    size: int
    region: Region
    mean_saliency: float


def _box_sums(patch: np.ndarray, radius: int):
    """Window sums and valid-pixel counts of a ``(2r+1)^2`` box, clipped
    at the patch border, via a summed-area table."""
    h, w = patch.shape
    sat = np.zeros((h + 1, w + 1), dtype=np.int64)
    sat[1:, 1:] = patch.astype(np.int64).cumsum(0).cumsum(1)
    rows = np.arange(h)
    cols = np.arange(w)
    r0 = np.clip(rows - radius, 0, h)[:, None]
    r1 = np.clip(rows + radius + 1, 0, h)[:, None]
    c0 = np.clip(cols - radius, 0, w)[None, :]
    c1 = np.clip(cols + radius + 1, 0, w)[None, :]
    sums = sat[r1, c1] - sat[r0, c1] - sat[r1, c0] + sat[r0, c0]
    counts = (r1 - r0) * (c1 - c0)
    return sums, counts


def adaptive_threshold(saliency: np.ndarray, region: Region, block: int = 5,
                       lam: float = 7.0) -> np.ndarray:
    """Foreground where ``g >= mean(block around pixel) - lam``.

    The block mean only uses pixels inside ``region``; everything outside
    the region is background.
    """
    if block < 1 or block % 2 == 0:
        raise ParameterError(f"block must be odd and >= 1, got {block}")
    if lam < 0:
        raise ParameterError(f"lam must be nonnegative, got {lam}")
    region.check_bounds(saliency.shape)
    patch = saliency[region.slices]
    sums, counts = _box_sums(patch, block // 2)
    # g >= sum/count - lam, rearranged to stay exact in integers
    fg = (patch.astype(np.float64) + lam) * counts >= sums
    mask = np.zeros(saliency.shape[:2], dtype=bool)
    mask[region.slices] = fg
    return mask


def dilate(mask: np.ndarray, se: StructuringElement = StructuringElement()) -> np.ndarray:
    """Binary dilation; structuring-element cells off the grid add nothing."""
    out = cv2.dilate(mask.astype(np.uint8), se.kernel(), anchor=(se.cols // 2, se.rows // 2),
                     borderType=cv2.BORDER_CONSTANT, borderValue=0)
    return out.astype(bool)


def label_components(mask: np.ndarray, saliency: np.ndarray | None = None):
    """Label image plus one ``Component`` per 8-connected blob.

    Component ``i`` in the list carries label ``i + 1``.
    """
    count, labels, stats, _ = cv2.connectedComponentsWithStats(
        mask.astype(np.uint8), connectivity=8, ltype=cv2.CV_32S)
    if count <= 1:
        return labels, []
    if saliency is not None:
        totals = np.bincount(labels.ravel(), weights=saliency.ravel().astype(np.float64),
                             minlength=count)
    comps = []
    for label in range(1, count):
        x, y, w, h, area = (int(v) for v in stats[label])
        mean = float(totals[label] / area) if saliency is not None else 0.0
        comps.append(Component(area, Region(x, y, w, h), mean))
    return labels, comps


def connected_components(mask: np.ndarray, saliency: np.ndarray | None = None) -> list[Component]:
    """8-connected foreground components in label (scan) order."""
    return label_components(mask, saliency)[1]


def select_target(components: list[Component]) -> Component | None:
    """Largest component; ties go to higher mean saliency, then scan order."""
    best = None
    for comp in components:
        if best is None or (comp.size, comp.mean_saliency) > (best.size, best.mean_saliency):
            best = comp
    return best


def otsu_level(values: np.ndarray) -> float:
    level, _ = cv2.threshold(np.ascontiguousarray(values, dtype=np.uint8).reshape(-1, 1),
                             0, 255, cv2.THRESH_BINARY | cv2.THRESH_OTSU)
    return float(level)


@dataclass
class Detection:
    box: BoundingBox
    component: Component
    core: np.ndarray     # thresholded pixels of the component, before dilation


def threshold_mask(saliency: np.ndarray, region: Region, config) -> np.ndarray:
    """Adaptive threshold, optionally gated by the region's Otsu level."""
    mask = adaptive_threshold(saliency, region, config.block, config.lam)
    if config.global_gate:
        patch = saliency[region.slices]
        mask[region.slices] &= patch > otsu_level(patch)
    return mask


def foreground_mask(saliency: np.ndarray, region: Region, config) -> np.ndarray:
    """Thresholded and dilated mask, restricted to ``region``."""
    mask = dilate(threshold_mask(saliency, region, config),
                  StructuringElement(config.se_rows, config.se_cols))
    inside = np.zeros_like(mask)
    inside[region.slices] = True
    return mask & inside


def detect_target(saliency: np.ndarray, region: Region, config=None) -> Detection | None:
    """Threshold, dilate and keep the dominant component in ``region``.

    ``None`` when the region is flat (nothing to threshold) or no
    foreground survives.
    """
    if config is None:
        from .config import TrackerConfig
        config = TrackerConfig()
    region.check_bounds(saliency.shape)
    patch = saliency[region.slices]
    if patch.min() == patch.max():
        return None
    core = threshold_mask(saliency, region, config)
    mask = dilate(core, StructuringElement(config.se_rows, config.se_cols))
    inside = np.zeros_like(mask)
    inside[region.slices] = True
    labels, comps = label_components(mask & inside, saliency)
    target = select_target(comps)
    if target is None:
        return None
    label = next(i for i, c in enumerate(comps) if c is target) + 1
    return Detection(target.region.as_box(), target, core & (labels == label))


def extract_target_box(saliency: np.ndarray, region: Region, config=None) -> BoundingBox | None:
    """Tight box around the dominant salient blob in ``region``."""
    found = detect_target(saliency, region, config)
    return None if found is None else found.box
