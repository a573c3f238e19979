import sys
from pathlib import Path

import cv2
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from folt.sequence_io import truth_from_boxes, write_groundtruth  # noqa: E402
from folt.synthetic import moving_square  # noqa: E402


def write_sequence(directory: Path, n_frames=12, gt=True, **kwargs):
    """PNG frames ``0001.png``.. plus ``groundtruth_rect.txt``."""
    directory.mkdir(parents=True, exist_ok=True)
    seq = moving_square(n_frames, **kwargs)
    for i, frame in enumerate(seq.frames, 1):
        cv2.imwrite(str(directory / f"{i:04d}.png"), frame[:, :, ::-1])
    if gt:
        write_groundtruth(directory / "groundtruth_rect.txt", truth_from_boxes(seq.truth))
    return seq


@pytest.fixture
def sequence_dir(tmp_path):
    path = tmp_path / "square"
    write_sequence(path)
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
