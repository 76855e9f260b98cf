"""Camera-tampering detection for grayscale surveillance video.

Detects three kinds of tampering: lens occlusion, defocus and camera
displacement. Also generates synthetic tamper clips with ground truth and
scores detectors against them.
"""

from .background import BackgroundModel, frame_diff
from .detectors import (
    DETECTORS,
    CombinedDetector,
    DetectorConfig,
    TamperEvent,
    make_detector,
    run_detector,
    run_detectors,
)
from .errors import TamperError
from .evaluation import compute_rates, evaluate_corpus, match_events, sweep
from .frame_io import Frame, FrameStream, open_stream
from .kinds import Kind
from .synth import GroundTruth, Scenario, TamperSpec, generate_scenario, standard_corpus

__version__ = "0.1.0"

__all__ = [
    "BackgroundModel",
    "frame_diff",
    "DETECTORS",
    "CombinedDetector",
    "DetectorConfig",
    "TamperEvent",
    "make_detector",
    "run_detector",
    "run_detectors",
    "TamperError",
    "compute_rates",
    "evaluate_corpus",
    "match_events",
    "sweep",
    "Frame",
    "FrameStream",
    "open_stream",
    "Kind",
    "GroundTruth",
    "Scenario",
    "TamperSpec",
    "generate_scenario",
    "standard_corpus",
]
