import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from camtamper.frame_io import Frame  # noqa: E402
from camtamper.synth import render_texture  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def texture():
    """A 120x160 textured uint8 scene."""
    return np.clip(render_texture(160, 120, seed=3), 0, 255).astype(np.uint8)


@pytest.fixture
def textured_frame(texture):
    return Frame(texture, 0)


def frames_of(*arrays):
    return [Frame(np.asarray(a, dtype=np.uint8), i) for i, a in enumerate(arrays)]


@pytest.fixture(scope="session")
def standard_clips():
    """The 10-clip standard corpus, rendered once per session."""
    from camtamper.evaluation import render_corpus
    from camtamper.synth import standard_corpus
    return render_corpus(standard_corpus(seed=0))


@pytest.fixture(scope="session")
def glitch_clips():
    from camtamper.evaluation import render_corpus
    from camtamper.synth import glitch_corpus
    return render_corpus(glitch_corpus(seed=0))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
