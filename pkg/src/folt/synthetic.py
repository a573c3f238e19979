"""Generated test sequences with exact ground truth."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BoundingBox


@dataclass
class SyntheticSequence:
    frames: list          # RGB uint8 arrays, H x W x 3
    truth: list           # BoundingBox or None per frame

    def __len__(self):
        return len(self.frames)


def moving_square(n_frames=100, size=(300, 200), side=20, start=(40, 40),
                  velocity=(2, 1), foreground=200, background=40, noise_sigma=5.0,
                  absent=(), seed=0) -> SyntheticSequence:
    """A bright square translating at constant velocity over a flat,
    noisy background.

    ``start`` is the top-left corner on frame 1 and ``absent`` holds the
    1-based frame numbers on which the square is not drawn. The square is
    clipped at the image border.
    """
    width, height = size
    rng = np.random.default_rng(seed)
    absent = set(absent)
    frames, truth = [], []
    for t in range(n_frames):
        x = start[0] + velocity[0] * t
        y = start[1] + velocity[1] * t
        img = np.full((height, width), float(background))
        x0, y0 = max(int(round(x)), 0), max(int(round(y)), 0)
        x1, y1 = min(int(round(x)) + side, width), min(int(round(y)) + side, height)
        visible = (t + 1) not in absent and x1 > x0 and y1 > y0
        if visible:
            img[y0:y1, x0:x1] = foreground
        if noise_sigma > 0:
            img += rng.normal(0.0, noise_sigma, img.shape)
        gray = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)
        frames.append(np.repeat(gray[:, :, None], 3, axis=2))
        truth.append(BoundingBox.from_tlwh(x0, y0, x1 - x0, y1 - y0) if visible else None)
    return SyntheticSequence(frames, truth)
