import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folt import kalman
from folt.errors import NumericError, ParameterError
from folt.raster import BoundingBox
from oracles import kalman_correct_oracle, kalman_gain_oracle, random_spd

MODEL = kalman.KalmanModel()


def test_predict_constant_velocity():
    s, G = kalman.predict([10, 20, 2, -1, 5, 5], np.eye(6), MODEL)
    assert s.tolist() == [12, 19, 2, -1, 5, 5]
    s, _ = kalman.predict([3, 4, 0, 0, 5, 5], np.eye(6), MODEL)
    assert s[:2].tolist() == [3, 4]
    _, G = kalman.predict(np.zeros(6), np.zeros((6, 6)), MODEL)
    assert np.allclose(G, 0.01 * np.eye(6))


def test_gain_identity_prior():
    K = kalman.gain(np.eye(6), MODEL)
    for a, i in enumerate((0, 1, 4, 5)):
        assert K[i, a] == pytest.approx(1 / 1.1)
    assert np.all(K[[2, 3]] == 0)


def test_gain_limits():
    zero_r = kalman.KalmanModel.from_diagonals(0.01, 0.0)
    K = kalman.gain(np.eye(6), zero_r)
    assert np.allclose(K, MODEL.C.T)
    huge_r = kalman.KalmanModel.from_diagonals(0.01, 1e12)
    assert np.abs(kalman.gain(np.eye(6), huge_r)).max() < 1e-11


def test_correct_examples():
    s, _ = kalman.correct([0, 0, 0, 0, 10, 10], np.eye(6), [1.1, 0, 10, 10], MODEL)
    assert s[0] == pytest.approx(1.0) and s[1] == pytest.approx(0.0)
    assert s[2] == 0 and s[3] == 0
    prior = np.array([5.0, 6.0, 1.0, 2.0, 8.0, 9.0])
    s, _ = kalman.correct(prior, np.eye(6), MODEL.C @ prior, MODEL)
    assert np.array_equal(s, prior)
    exact = kalman.KalmanModel.from_diagonals(0.01, 0.0)
    s, _ = kalman.correct(prior, np.eye(6), [1, 2, 3, 4], exact)
    assert np.allclose(s[[0, 1, 4, 5]], [1, 2, 3, 4])


def test_correct_clamps_size():
    exact = kalman.KalmanModel.from_diagonals(0.01, 0.0)
    s, _ = kalman.correct(np.array([5.0, 5, 0, 0, 4, 4]), np.eye(6), [5, 5, -3, 0.2], exact)
    assert s[4] == 1.0 and s[5] == 1.0


def test_init_filter():
    s, G = kalman.init_filter(BoundingBox(50, 50, 20, 10))
    assert s.tolist() == [50, 50, 0, 0, 20, 10]
    assert np.array_equal(G, np.eye(6))


def test_errors():
    with pytest.raises(NumericError):
        kalman.predict([np.nan, 0, 0, 0, 1, 1], np.eye(6), MODEL)
    with pytest.raises(NumericError):
        kalman.correct(np.ones(6), np.eye(6), [np.inf, 0, 1, 1], MODEL)
    singular = kalman.KalmanModel.from_diagonals(0.01, 0.0)
    with pytest.raises(NumericError):
        kalman.gain(np.zeros((6, 6)), singular)
    with pytest.raises(ParameterError):
        kalman.KalmanModel.from_diagonals(-1, 0.1)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_correct_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    G = random_spd(rng)
    s = rng.normal(size=6) * 20 + np.array([0, 0, 0, 0, 50, 50])
    y = rng.normal(size=4) * 20 + np.array([0, 0, 50, 50])
    K = kalman.gain(G, MODEL)
    K_ref = np.array(kalman_gain_oracle(G.tolist(), MODEL.R.tolist()))
    assert np.abs(K - K_ref).max() < 1e-9
    s_new, G_new = kalman.correct(s, G, y, MODEL)
    s_ref, G_ref = kalman_correct_oracle(s.tolist(), G.tolist(), y.tolist(), MODEL.R.tolist())
    assert np.abs(s_new - s_ref).max() < 1e-9
    assert np.abs(G_new - np.array(G_ref)).max() < 1e-9


def test_covariance_stays_psd():
    rng = np.random.default_rng(0)
    s, G = kalman.init_filter(BoundingBox(100, 80, 20, 20))
    for _ in range(2000):
        s, G = kalman.predict(s, G, MODEL)
        s, G = kalman.correct(s, G, MODEL.C @ s + rng.normal(size=4), MODEL)
        assert np.array_equal(G, G.T)
    assert np.linalg.eigvalsh(G).min() >= -1e-9
