import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folt.errors import InputError, ParseError
from folt.evaluation import summarize
from folt.raster import BoundingBox
from folt.sequence_io import (GroundTruthTrack, RunArtifacts, draw_overlay, load_sequence,
                              natural_key, parse_groundtruth, read_frame, render_overlay,
                              write_artifacts, write_groundtruth)
from folt.tracker import LOST, TRACKING, FrameResult


def test_natural_sort(tmp_path):
    for name in ("img_10.png", "img_2.png", "img_1.jpg"):
        (tmp_path / name).write_bytes(b"")
    manifest = load_sequence(tmp_path)
    assert [p.name for p in manifest.frames] == ["img_1.jpg", "img_2.png", "img_10.png"]
    assert manifest.groundtruth is None


@settings(max_examples=100)
@given(st.lists(st.from_regex(r"[a-c]{0,2}[0-9]{0,3}", fullmatch=True), unique=True, max_size=8))
def test_natural_sort_total_and_stable(names):
    ordered = sorted(names, key=natural_key)
    shuffled = names[:]
    random.Random(0).shuffle(shuffled)
    assert sorted(shuffled, key=natural_key) == ordered


def test_load_sequence_errors(tmp_path):
    with pytest.raises(InputError):
        load_sequence(tmp_path)
    with pytest.raises(OSError):
        load_sequence(tmp_path / "missing")


def test_load_sequence_img_subdir(sequence_dir):
    img = sequence_dir / "img"
    img.mkdir()
    for p in sequence_dir.glob("*.png"):
        p.rename(img / p.name)
    manifest = load_sequence(sequence_dir)
    assert len(manifest) == 12 and manifest.groundtruth.name == "groundtruth_rect.txt"
    frame = manifest.loaders()[0]()
    assert frame.shape == (200, 300, 3)


def test_read_frame_bad(tmp_path):
    bad = tmp_path / "x.png"
    bad.write_bytes(b"not an image")
    with pytest.raises(InputError):
        read_frame(bad)


@pytest.mark.parametrize("line", ["10,20,30,40", "10\t20\t30\t40", "10 20  30 40", "10, 20, 30, 40"])
def test_parse_line_formats(tmp_path, line):
    path = tmp_path / "gt.txt"
    path.write_text(line + "\n")
    track = parse_groundtruth(path, 1)
    box = track.boxes()[0]
    assert box.tlwh() == (10, 20, 30, 40)


def test_parse_absent_and_errors(tmp_path):
    path = tmp_path / "gt.txt"
    path.write_text("1,2,3,4\nNaN,NaN,NaN,NaN\nabsent\n")
    assert parse_groundtruth(path, 3).boxes()[1:] == [None, None]
    with pytest.raises(InputError):
        parse_groundtruth(path, 4)
    path.write_text("1,2,3,4\n1,2,x,4\n")
    with pytest.raises(ParseError) as info:
        parse_groundtruth(path)
    assert info.value.line == 2 and ":2:" in str(info.value)
    path.write_text("1,2,3\n")
    with pytest.raises(ParseError):
        parse_groundtruth(path)
    path.write_text("")
    with pytest.raises(InputError):
        parse_groundtruth(path)


finite = st.floats(0, 1e4, allow_nan=False).map(lambda v: round(v, 3))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.one_of(st.none(), st.tuples(finite, finite, st.floats(1, 500), st.floats(1, 500))),
                min_size=1, max_size=10))
def test_groundtruth_roundtrip(tmp_path_factory, rows):
    tlwh = np.array([r if r is not None else [math.nan] * 4 for r in rows], dtype=float)
    track = GroundTruthTrack(tlwh.reshape(-1, 4))
    path = tmp_path_factory.mktemp("gt") / "gt.txt"
    write_groundtruth(path, track)
    back = parse_groundtruth(path, len(rows))
    assert np.array_equal(back.tlwh, track.tlwh, equal_nan=True)


def _run():
    truth = [BoundingBox.from_tlwh(10, 10, 20, 20)] * 3
    results = [FrameResult(1, BoundingBox.from_tlwh(10, 10, 20, 20), TRACKING, 2.0),
               FrameResult(2, None, LOST, 2.0),
               FrameResult(3, BoundingBox.from_tlwh(13, 14, 20, 20), TRACKING, 2.0)]
    return results, truth


def test_write_artifacts(tmp_path):
    results, truth = _run()
    write_artifacts(RunArtifacts(results, truth, summarize(results, truth)), tmp_path)
    rows = (tmp_path / "results.csv").read_bytes().decode().split("\n")
    assert rows[0] == "frame,status,x,y,w,h,cle,iou,ms"
    assert rows[1] == "1,tracking,10.0000,10.0000,20.0000,20.0000,0.0000,1.0000,"
    assert rows[2] == "2,lost,,,,,inf,0.0000,"
    assert rows[3].startswith("3,tracking,13.0000,14.0000,20.0000,20.0000,5.0000,")
    assert rows[4] == "" and len(rows) == 5
    assert b"\r" not in (tmp_path / "results.csv").read_bytes()
    prec = (tmp_path / "precision_curve.csv").read_text().splitlines()
    succ = (tmp_path / "success_curve.csv").read_text().splitlines()
    assert prec[0] == "threshold,value" and len(prec) == 52 and len(succ) == 22
    summary = dict(l.split("=", 1) for l in (tmp_path / "summary.txt").read_text().splitlines())
    for key in ("precision_20", "success_050", "cle_mean", "fps_median"):
        assert key in summary
    assert summary["precision_20"] == "0.6667"


def test_write_artifacts_without_truth_and_timings(tmp_path):
    results, _ = _run()
    write_artifacts(RunArtifacts(results, None, None, timings=True), tmp_path)
    rows = (tmp_path / "results.csv").read_text().splitlines()
    assert rows[1] == "1,tracking,10.0000,10.0000,20.0000,20.0000,,,2.0000"
    assert not (tmp_path / "precision_curve.csv").exists()
    assert "fps_median=500.0000" in (tmp_path / "summary.txt").read_text()


def test_write_artifacts_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    results, truth = _run()
    with pytest.raises(OSError, match="file"):
        write_artifacts(RunArtifacts(results, truth), blocker / "out")


def test_overlay(tmp_path):
    frame = np.zeros((40, 50, 3), np.uint8)
    truth = BoundingBox.from_tlwh(5, 5, 10, 10)
    tracked = draw_overlay(frame, FrameResult(1, BoundingBox.from_tlwh(20, 20, 10, 10), TRACKING, 1.0), truth)
    green = np.all(tracked == (0, 255, 0), axis=2)
    red = np.all(tracked == (0, 0, 255), axis=2)
    assert green[20:30, 20].any() and red[5:15, 5].any()
    lost = draw_overlay(frame, FrameResult(2, None, LOST, 1.0), None)
    assert not np.all(lost == (0, 255, 0), axis=2)[20:30, 20].any()
    path = render_overlay(frame, FrameResult(2, None, LOST, 1.0), None, tmp_path / "o" / "a.png")
    assert path.is_file()
