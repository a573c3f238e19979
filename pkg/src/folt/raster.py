"""Raster primitives shared by the rest of the package.

Images are plain numpy arrays indexed ``[row, col]``: ``uint8`` for
intensities and ``float64`` for distance maps. Box geometry uses the
continuous convention where pixel ``i`` covers ``[i, i + 1)``, so a box
spanning columns ``c0..c1`` has ``w = c1 - c0 + 1`` and center
``c0 + w / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import BoundsError, DimensionError, NumericError, ParameterError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class Region:
    """Integer pixel rectangle: top-left ``(x0, y0)`` plus extent."""

    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ParameterError(f"region extent must be >= 1, got {self.w}x{self.h}")

    @classmethod
    def full(cls, shape) -> "Region":
        return cls(0, 0, int(shape[1]), int(shape[0]))

    @property
    def x1(self) -> int:
        return self.x0 + self.w

    @property
    def y1(self) -> int:
        return self.y0 + self.h

    @property
    def slices(self):
        return slice(self.y0, self.y1), slice(self.x0, self.x1)

    @property
    def area(self) -> int:
        return self.w * self.h

    def check_bounds(self, shape):
        height, width = shape[:2]
        if self.x0 < 0 or self.y0 < 0 or self.x1 > width or self.y1 > height:
            raise BoundsError(f"{self} does not fit a {width}x{height} grid")

    def is_full(self, shape) -> bool:
        return self == Region.full(shape)

    def contains(self, other: "Region") -> bool:
        return (self.x0 <= other.x0 and self.y0 <= other.y0
                and other.x1 <= self.x1 and other.y1 <= self.y1)

    def as_box(self) -> "BoundingBox":
        return BoundingBox(self.x0 + self.w / 2, self.y0 + self.h / 2, float(self.w), float(self.h))


@dataclass(frozen=True)
class BoundingBox:
    """Real-valued box given by its center and size."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ParameterError(f"box size must be positive, got {self.w}x{self.h}")

    @classmethod
    def from_tlwh(cls, x, y, w, h) -> "BoundingBox":
        return cls(x + w / 2, y + h / 2, float(w), float(h))

    def tlwh(self):
        return (self.cx - self.w / 2, self.cy - self.h / 2, self.w, self.h)

    @property
    def left(self) -> float:
        return self.cx - self.w / 2

    @property
    def top(self) -> float:
        return self.cy - self.h / 2

    @property
    def right(self) -> float:
        return self.cx + self.w / 2

    @property
    def bottom(self) -> float:
        return self.cy + self.h / 2

    def rounded_out(self) -> Region:
        """Smallest integer region covering the box (unclipped)."""
        x0 = math.floor(self.left)
        y0 = math.floor(self.top)
        x1 = max(math.ceil(self.right), x0 + 1)
        y1 = max(math.ceil(self.bottom), y0 + 1)
        return Region(x0, y0, x1 - x0, y1 - y0)

    def clip(self, width, height) -> "BoundingBox":
        """Clip to ``[0, width] x [0, height]``, keeping at least one pixel."""
        left = min(max(self.left, 0.0), width - 1.0)
        top = min(max(self.top, 0.0), height - 1.0)
        right = max(min(self.right, float(width)), left + 1.0)
        bottom = max(min(self.bottom, float(height)), top + 1.0)
        return BoundingBox((left + right) / 2, (top + bottom) / 2, right - left, bottom - top)


@dataclass(frozen=True)
class ScaleTransform:
    """Maps working-resolution coordinates back to the original image."""

    factor: float = 1.0

    def __post_init__(self):
        if not self.factor > 0:
            raise ParameterError(f"scale factor must be positive, got {self.factor}")

    def to_original(self, box: BoundingBox) -> BoundingBox:
        f = self.factor
        return BoundingBox(box.cx * f, box.cy * f, box.w * f, box.h * f)

    def to_working(self, box: BoundingBox) -> BoundingBox:
        f = self.factor
        return BoundingBox(box.cx / f, box.cy / f, box.w / f, box.h / f)


def _round_half_up(x):
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def to_luma(color_image) -> np.ndarray:
    """Convert an RGB image (``H x W x 3``, or a sequence of three
    equal-sized channels) to 8-bit luminance."""
    if isinstance(color_image, (list, tuple)):
        if len(color_image) != 3:
            raise DimensionError(f"expected 3 channels, got {len(color_image)}")
        channels = [np.asarray(c) for c in color_image]
        if any(c.ndim != 2 or c.shape != channels[0].shape for c in channels):
            raise DimensionError("channel dimensions differ: "
                                 + ", ".join(str(c.shape) for c in channels))
    else:
        arr = np.asarray(color_image)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionError(f"expected an HxWx3 image, got shape {arr.shape}")
        channels = [arr[..., i] for i in range(3)]
    r, g, b = (c.astype(np.float64) for c in channels)
    luma = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b
    return np.clip(_round_half_up(luma), 0, 255).astype(np.uint8)


def resize_max_dim(image: np.ndarray, max_dim: int = 300):
    """Shrink ``image`` so its larger side equals ``max_dim``.

    Images already within the limit are returned unchanged. Returns the
    resized image and the transform back to input coordinates.
    """
    if max_dim < 1:
        raise ParameterError(f"max_dim must be >= 1, got {max_dim}")
    image = np.asarray(image)
    if image.ndim < 2 or image.shape[0] < 1 or image.shape[1] < 1:
        raise DimensionError(f"not an image: shape {image.shape}")
    height, width = image.shape[:2]
    largest = max(height, width)
    if largest <= max_dim:
        return image, ScaleTransform(1.0)
    ratio = max_dim / largest
    if width >= height:
        new_w, new_h = max_dim, max(1, int(_round_half_up(height * ratio)))
    else:
        new_w, new_h = max(1, int(_round_half_up(width * ratio))), max_dim
    resized = cv2.resize(image, (new_w, new_h), interpolation=cv2.INTER_LINEAR)
    return resized, ScaleTransform(largest / max_dim)


def normalize_to_u8(grid: np.ndarray, region: Region) -> np.ndarray:
    """Min-max stretch the in-region samples of ``grid`` onto 0..255.

    Samples outside ``region`` become 0, as does a constant region.
    """
    region.check_bounds(grid.shape)
    out = np.zeros(grid.shape[:2], dtype=np.uint8)
    patch = np.asarray(grid[region.slices], dtype=np.float64)
    if not np.all(np.isfinite(patch)):
        raise NumericError("non-finite sample inside the normalization region")
    lo = patch.min()
    hi = patch.max()
    if hi > lo:
        scaled = _round_half_up((patch - lo) * (255.0 / (hi - lo)))
        out[region.slices] = np.clip(scaled, 0, 255).astype(np.uint8)
    return out


def expand_region(box: BoundingBox, delta: float, bounds) -> Region:
    """Inflate ``box`` by ``delta * w`` on each side horizontally and
    ``delta * h`` vertically, round outward and clip to ``bounds``.

    ``bounds`` is ``(width, height)``. The result is never empty.
    """
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta}")
    width, height = int(bounds[0]), int(bounds[1])
    grown = BoundingBox(box.cx, box.cy, box.w * (1 + 2 * delta), box.h * (1 + 2 * delta))
    raw = grown.rounded_out()
    x0 = min(max(raw.x0, 0), width - 1)
    y0 = min(max(raw.y0, 0), height - 1)
    x1 = max(min(raw.x1, width), x0 + 1)
    y1 = max(min(raw.y1, height), y0 + 1)
    return Region(x0, y0, x1 - x0, y1 - y0)
