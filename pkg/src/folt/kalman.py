"""Constant-velocity Kalman filter over ``s = (x, y, u, v, w, h)``.

``(x, y)`` is the box center, ``(u, v)`` its velocity in pixels per frame
and ``(w, h)`` its size. Measurements are ``(x, y, w, h)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ParameterError
from .raster import BoundingBox

STATE_DIM = 6
MEAS_DIM = 4
MIN_SIZE = 1.0

# state indices
X, Y, U, V, W, H = range(6)


def transition_matrix() -> np.ndarray:
    Hm = np.eye(STATE_DIM)
    Hm[X, U] = 1.0
    Hm[Y, V] = 1.0
    return Hm


def measurement_matrix() -> np.ndarray:
    C = np.zeros((MEAS_DIM, STATE_DIM))
    C[0, X] = C[1, Y] = C[2, W] = C[3, H] = 1.0
    return C


@dataclass
class KalmanModel:
    H: np.ndarray = field(default_factory=transition_matrix)
    C: np.ndarray = field(default_factory=measurement_matrix)
    Q: np.ndarray = field(default_factory=lambda: 0.01 * np.eye(STATE_DIM))
    R: np.ndarray = field(default_factory=lambda: 0.1 * np.eye(MEAS_DIM))

    @classmethod
    def from_diagonals(cls, q_diag=0.01, r_diag=0.1) -> "KalmanModel":
        q = np.broadcast_to(np.asarray(q_diag, dtype=float), (STATE_DIM,))
        r = np.broadcast_to(np.asarray(r_diag, dtype=float), (MEAS_DIM,))
        if (q < 0).any() or (r < 0).any():
            raise ParameterError("noise covariances must be nonnegative")
        return cls(Q=np.diag(q), R=np.diag(r))


def _check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"non-finite {what}: {arr}")


def predict(state, cov, model: KalmanModel):
    """A-priori state ``H s`` and covariance ``H G H^T + Q``."""
    state = np.asarray(state, dtype=float)
    _check_finite(state, "state")
    prior_state = model.H @ state
    prior_cov = model.H @ cov @ model.H.T + model.Q
    return prior_state, prior_cov


def gain(cov_prior, model: KalmanModel) -> np.ndarray:
    """Kalman gain ``G C^T (C G C^T + R)^-1`` (6x4)."""
    C = model.C
    innovation = C @ cov_prior @ C.T + model.R
    cross = cov_prior @ C.T
    try:
        # K S = cross  <=>  S^T K^T = cross^T
        return np.linalg.solve(innovation.T, cross.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericError("innovation covariance is singular") from exc


def correct(state_prior, cov_prior, meas, model: KalmanModel):
    """Fold measurement ``(x, y, w, h)`` into the a-priori estimate."""
    state_prior = np.asarray(state_prior, dtype=float)
    y = np.asarray(meas, dtype=float)
    _check_finite(y, "measurement")
    K = gain(cov_prior, model)
    state = state_prior + K @ (y - model.C @ state_prior)
    cov = (np.eye(STATE_DIM) - K @ model.C) @ cov_prior
    cov = 0.5 * (cov + cov.T)
    state[W] = max(state[W], MIN_SIZE)
    state[H] = max(state[H], MIN_SIZE)
    return state, cov


def init_filter(box: BoundingBox, model: KalmanModel | None = None):
    """State at ``box`` with zero velocity and identity covariance."""
    state = np.array([box.cx, box.cy, 0.0, 0.0, box.w, box.h])
    return state, np.eye(STATE_DIM)


def measurement_from_box(box: BoundingBox) -> np.ndarray:
    return np.array([box.cx, box.cy, box.w, box.h])


def box_from_state(state) -> BoundingBox:
    return BoundingBox(float(state[X]), float(state[Y]),
                       max(float(state[W]), MIN_SIZE), max(float(state[H]), MIN_SIZE))
