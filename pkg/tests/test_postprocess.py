import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from folt.config import TrackerConfig
from folt.errors import ParameterError
from folt.postprocess import (Component, StructuringElement, adaptive_threshold,
                              connected_components, detect_target, dilate,
                              extract_target_box, select_target)
from folt.raster import Region
from oracles import naive_adaptive_threshold, naive_dilate

masks = arrays(np.bool_, st.tuples(st.integers(1, 14), st.integers(1, 14)))


@pytest.mark.parametrize("value, lam", [(100, 7.0), (0, 0.0)])
def test_threshold_uniform(value, lam):
    g = np.full((6, 6), value, np.uint8)
    mask = adaptive_threshold(g, Region(1, 1, 4, 4), 5, lam)
    assert mask[1:5, 1:5].all()
    assert mask.sum() == 16


def test_threshold_line_example():
    g = np.array([[0, 255, 0]], np.uint8)
    assert adaptive_threshold(g, Region.full(g.shape), 3, 7.0).tolist() == [[False, True, False]]


@settings(max_examples=100, deadline=None)
@given(arrays(np.uint8, (12, 13), elements=st.integers(0, 255)),
       st.integers(0, 11), st.integers(0, 12), st.integers(1, 12), st.integers(1, 13),
       st.sampled_from([1, 3, 5, 7]), st.sampled_from([0.0, 3.0, 7.0, 20.5]))
def test_threshold_matches_naive(g, y0, x0, h, w, block, lam):
    region = Region(x0, y0, min(w, 13 - x0), min(h, 12 - y0))
    assert np.array_equal(adaptive_threshold(g, region, block, lam),
                          naive_adaptive_threshold(g, region, block, lam))


def test_threshold_parameter_errors():
    g = np.zeros((4, 4), np.uint8)
    with pytest.raises(ParameterError):
        adaptive_threshold(g, Region.full(g.shape), 4, 7.0)
    with pytest.raises(ParameterError):
        adaptive_threshold(g, Region.full(g.shape), 5, -1.0)
    with pytest.raises(ParameterError):
        StructuringElement(4, 3)


def test_dilate_examples():
    mask = np.zeros((9, 9), bool)
    mask[4, 4] = True
    out = dilate(mask)
    assert out.sum() == 15 and out[2:7, 3:6].all()
    assert not dilate(np.zeros((5, 5), bool)).any()
    assert dilate(np.ones((5, 5), bool)).all()


@settings(max_examples=150, deadline=None)
@given(masks, st.sampled_from([(1, 1), (3, 3), (5, 3), (3, 5)]))
def test_dilate_matches_naive_and_extensive(mask, se):
    out = dilate(mask, StructuringElement(*se))
    assert np.array_equal(out, naive_dilate(mask, *se))
    assert (out | mask).sum() == out.sum()


@settings(max_examples=100, deadline=None)
@given(masks, st.data())
def test_dilate_monotone(mask, data):
    extra = data.draw(arrays(np.bool_, mask.shape))
    bigger = mask | extra
    assert not (dilate(mask) & ~dilate(bigger)).any()


def test_dilate_translation_equivariant():
    mask = np.zeros((20, 20), bool)
    mask[8:10, 7:9] = True
    shifted = np.roll(np.roll(mask, 3, 0), 2, 1)
    assert np.array_equal(np.roll(np.roll(dilate(mask), 3, 0), 2, 1), dilate(shifted))


def test_components():
    mask = np.zeros((8, 10), bool)
    mask[0, 0:5] = True
    mask[5:8, 8] = True
    assert sorted(c.size for c in connected_components(mask)) == [3, 5]
    diag = np.eye(4, dtype=bool)
    assert len(connected_components(diag)) == 1
    assert connected_components(np.zeros((3, 3), bool)) == []
    comp = connected_components(mask)[0]
    assert comp.region == Region(0, 0, 5, 1)


def test_select_target_ties():
    a = Component(5, Region(0, 0, 1, 1), 10.0)
    b = Component(5, Region(1, 1, 1, 1), 20.0)
    c = Component(5, Region(2, 2, 1, 1), 20.0)
    assert select_target([a, b, c]) is b
    assert select_target([]) is None


def test_extract_square_box():
    sal = np.zeros((60, 80), np.uint8)
    sal[20:30, 30:40] = 230
    box = extract_target_box(sal, Region.full(sal.shape))
    assert abs(box.left - 30) <= 2 and abs(box.right - 40) <= 2
    assert abs(box.top - 20) <= 2 and abs(box.bottom - 30) <= 2


def test_extract_largest_of_two():
    sal = np.zeros((60, 80), np.uint8)
    sal[10:15, 10:20] = 220     # 50 px
    sal[40:42, 60:64] = 220     # 8 px
    box = extract_target_box(sal, Region.full(sal.shape))
    assert box.left < 20 and box.top < 20


def test_flat_region_absent():
    sal = np.zeros((30, 30), np.uint8)
    assert detect_target(sal, Region(5, 5, 10, 10)) is None


def test_literal_threshold_without_gate():
    # without the Otsu gate the flat background is foreground too
    sal = np.zeros((40, 40), np.uint8)
    sal[15:20, 15:20] = 200
    config = TrackerConfig(global_gate=False)
    box = extract_target_box(sal, Region.full(sal.shape), config)
    assert box.w > 30
    gated = extract_target_box(sal, Region.full(sal.shape), TrackerConfig())
    assert gated.w < 12
