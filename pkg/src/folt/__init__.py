"""Real-time salient object localization and tracking.

Minimum barrier distance saliency, updated locally around a Kalman
prediction, drives a tracking-by-detection loop that needs no manual
initialization.
"""
from .config import TrackerConfig
from .errors import (BoundsError, DimensionError, FoltError, InputError, NumericError,
                     ParameterError, ParseError)
from .raster import BoundingBox, Region, ScaleTransform
from .saliency import DistanceMaps, local_update, mbd_saliency
from .tracker import FrameResult, TrackerState, initialize, process_frame, track_sequence

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "BoundsError", "DimensionError", "DistanceMaps", "FoltError",
    "FrameResult", "InputError", "NumericError", "ParameterError", "ParseError",
    "Region", "ScaleTransform", "TrackerConfig", "TrackerState", "initialize",
    "local_update", "mbd_saliency", "process_frame", "track_sequence",
]
