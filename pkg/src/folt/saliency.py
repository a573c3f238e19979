"""Minimum barrier distance (MBD) saliency via raster scanning.

The barrier of a path is the spread ``max - min`` of the intensities it
visits; a pixel's distance is the smallest barrier over all 4-adjacent
paths reaching the seed set. Alternating forward/backward raster passes
approximate it from above, carrying the running path maximum ``U`` and
minimum ``L`` for every pixel.

Passes can be restricted to a search region. Pixels outside the region
keep whatever ``D``, ``U`` and ``L`` they already hold and are still read
as neighbors, which is how background distance flows into a region that
does not touch the image frame.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BoundsError, DimensionError, ParameterError
from .raster import Region

DEFAULT_PASSES = 3


class ScanDirection(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass
class DistanceMaps:
    """Distance ``D`` plus path envelope ``U`` (max) and ``L`` (min)."""

    D: np.ndarray
    U: np.ndarray
    L: np.ndarray

    @property
    def shape(self):
        return self.D.shape

    def copy(self) -> "DistanceMaps":
        return DistanceMaps(self.D.copy(), self.U.copy(), self.L.copy())


@njit(cache=True, nogil=True)
def _scan(D, U, L, I, y0, y1, x0, x1, step):
    """Relax every region pixel from its two causal neighbors.

    ``step = 1``: row-major order reading left then up.
    ``step = -1``: reverse order reading right then down.
    Returns whether any distance decreased.
    """
    height, width = I.shape
    if step > 0:
        r_first, r_stop, c_first, c_stop = y0, y1, x0, x1
    else:
        r_first, r_stop, c_first, c_stop = y1 - 1, y0 - 1, x1 - 1, x0 - 1
    changed = False
    r = r_first
    while r != r_stop:
        rm = r - step
        has_row = 0 <= rm < height
        c = c_first
        while c != c_stop:
            iz = I[r, c]
            d = D[r, c]
            cm = c - step
            if 0 <= cm < width and D[r, cm] != np.inf:
                hi = max(U[r, cm], iz)
                lo = min(L[r, cm], iz)
                if hi - lo < d:
                    d = hi - lo
                    D[r, c] = d
                    U[r, c] = hi
                    L[r, c] = lo
                    changed = True
            if has_row and D[rm, c] != np.inf:
                hi = max(U[rm, c], iz)
                lo = min(L[rm, c], iz)
                if hi - lo < d:
                    d = hi - lo
                    D[r, c] = d
                    U[r, c] = hi
                    L[r, c] = lo
                    changed = True
            c += step
        r += step
    return changed


def _as_float(image) -> np.ndarray:
    image = np.asarray(image)
    if image.ndim != 2:
        raise DimensionError(f"expected a single-channel image, got shape {image.shape}")
    return np.ascontiguousarray(image, dtype=np.float64)


def _as_seeds(seeds, shape) -> np.ndarray:
    arr = np.asarray(seeds, dtype=np.int64).reshape(-1, 2)
    if arr.size:
        rows, cols = arr[:, 0], arr[:, 1]
        bad = (rows < 0) | (rows >= shape[0]) | (cols < 0) | (cols >= shape[1])
        if bad.any():
            raise BoundsError(f"seed {tuple(arr[bad][0])} outside a {shape[1]}x{shape[0]} grid")
    return arr


def boundary_seeds(shape, region: Region | None = None) -> np.ndarray:
    """Pixels of the image's outer one-pixel frame that fall in ``region``.

    Returns an ``(k, 2)`` array of ``(row, col)``; empty when the region
    does not touch the frame.
    """
    height, width = shape[:2]
    frame = np.zeros((height, width), dtype=bool)
    frame[0, :] = frame[-1, :] = True
    frame[:, 0] = frame[:, -1] = True
    if region is not None:
        region.check_bounds(shape)
        clip = np.zeros_like(frame)
        clip[region.slices] = True
        frame &= clip
    return np.argwhere(frame)


def init_maps(image, seeds, region: Region | None = None,
              prior: DistanceMaps | None = None) -> DistanceMaps:
    """Fresh maps for a scan over ``region``.

    Inside the region ``D`` is infinite except at seeds (0) and ``U = L = I``.
    Outside, values come from ``prior`` when given, else ``D`` is infinite.
    """
    I = _as_float(image)
    region = Region.full(I.shape) if region is None else region
    region.check_bounds(I.shape)
    seeds = _as_seeds(seeds, I.shape)
    if prior is not None and prior.shape != I.shape:
        raise DimensionError(f"prior maps {prior.shape} do not match image {I.shape}")

    if prior is None or region.is_full(I.shape):
        maps = DistanceMaps(np.full(I.shape, np.inf), I.copy(), I.copy())
    else:
        maps = prior.copy()
        ys, xs = region.slices
        maps.D[ys, xs] = np.inf
        maps.U[ys, xs] = I[ys, xs]
        maps.L[ys, xs] = I[ys, xs]

    if seeds.size:
        rows, cols = seeds[:, 0], seeds[:, 1]
        inside = ((rows >= region.y0) & (rows < region.y1)
                  & (cols >= region.x0) & (cols < region.x1))
        maps.D[rows[inside], cols[inside]] = 0.0
    return maps


def _run_pass(maps: DistanceMaps, I: np.ndarray, region: Region, direction) -> bool:
    step = 1 if direction is ScanDirection.FORWARD else -1
    return _scan(maps.D, maps.U, maps.L, I, region.y0, region.y1, region.x0, region.x1, step)


def scan_pass(maps: DistanceMaps, image, region: Region | None = None,
              direction: ScanDirection = ScanDirection.FORWARD) -> DistanceMaps:
    """One raster (forward) or inverse-raster (backward) pass.

    Forward passes relax each pixel from its left and upper neighbors,
    backward passes from its right and lower ones. Returns new maps; the
    input is left untouched.
    """
    I = _as_float(image)
    if maps.shape != I.shape:
        raise DimensionError(f"maps {maps.shape} do not match image {I.shape}")
    region = Region.full(I.shape) if region is None else region
    region.check_bounds(I.shape)
    out = maps.copy()
    _run_pass(out, I, region, ScanDirection(direction))
    return out


def pass_direction(index: int) -> ScanDirection:
    """Direction of the 1-based pass ``index``: odd passes scan forward."""
    return ScanDirection.FORWARD if index % 2 == 1 else ScanDirection.BACKWARD


def run_passes(maps: DistanceMaps, I: np.ndarray, region: Region, passes: int) -> DistanceMaps:
    """Alternating passes applied in place on ``maps``."""
    for i in range(1, passes + 1):
        _run_pass(maps, I, region, pass_direction(i))
    return maps


def mbd_saliency(image, region: Region | None = None, seeds=None,
                 passes: int = DEFAULT_PASSES,
                 prior: DistanceMaps | None = None) -> DistanceMaps:
    """MBD maps after ``passes`` alternating scans starting forward.

    Defaults: whole image, seeded on the image frame.
    """
    if passes < 1:
        raise ParameterError(f"passes must be >= 1, got {passes}")
    I = _as_float(image)
    region = Region.full(I.shape) if region is None else region
    if seeds is None:
        seeds = boundary_seeds(I.shape, region)
    maps = init_maps(I, seeds, region, prior)
    return run_passes(maps, I, region, passes)


def local_update(prior: DistanceMaps, image, search: Region,
                 passes: int = DEFAULT_PASSES) -> DistanceMaps:
    """Recompute ``prior`` inside ``search`` only, keeping the rest.

    Seeds are the image-frame pixels inside ``search`` (possibly none).
    """
    I = _as_float(image)
    if prior.shape != I.shape:
        raise DimensionError(f"prior maps {prior.shape} do not match image {I.shape}")
    return mbd_saliency(I, search, boundary_seeds(I.shape, search), passes, prior)
