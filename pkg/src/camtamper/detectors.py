"""Per-stream tamper detectors.

Every detector is a small stateful object: feed frames in order through
:meth:`Detector.step`, get back a :class:`TamperEvent` or ``None``. None of
them emits on its first frame.

=========  ==============================  ==========================
id         class                           cue
=========  ==============================  ==========================
alg1       EntropyOcclusionDetector        entropy ratio drop
alg2       HuangDetector                   diff gate + histogram + edges
alg3       DCTDefocusDetector              DCT high-frequency loss
alg4       FFTDefocusDetector              FFT high-frequency loss
alg5       EdgeTamperDetector              edge-map disagreement
motion     PixelPositionMotionDetector     background deviation count
combined   CombinedDetector                alg5 + alg2 + alg3 fusion
=========  ==============================  ==========================
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Iterable

import numpy as np

from . import imgproc
from .background import BackgroundModel, frame_diff
from .errors import ConfigError, DomainError
from .frame_io import Frame
from .kinds import Kind

__all__ = [
    "Kind",
    "TamperEvent",
    "DetectorConfig",
    "Detector",
    "EntropyOcclusionDetector",
    "HuangDetector",
    "DCTDefocusDetector",
    "FFTDefocusDetector",
    "EdgeTamperDetector",
    "PixelPositionMotionDetector",
    "CombinedDetector",
    "DETECTORS",
    "make_detector",
    "run_detector",
    "run_detectors",
    "hist_window_sum",
]

# below this the previous entropy is treated as zero (already-covered camera)
ENTROPY_FLOOR = 1e-9


@dataclass(frozen=True)
class TamperEvent:
    kind: Kind
    frame_index: int
    score: float
    detector_id: str

    def to_dict(self) -> dict:
        return {"detector": self.detector_id, "kind": self.kind.value,
                "frame": self.frame_index, "score": self.score}

    @classmethod
    def from_dict(cls, d: dict) -> "TamperEvent":
        return cls(Kind(d["kind"]), int(d["frame"]), float(d["score"]), str(d["detector"]))


@dataclass(frozen=True)
class DetectorConfig:
    alpha_entropy: float = 0.5
    tau: float = 25.0
    theta_B: float = 0.6
    n_hist: int = 10
    theta_obstruction: float = 2.0
    theta_contour: float = 0.5
    beta_L: float = 0.70
    eps_dct: float = 1.0
    eps_fft: float = 1.0
    alpha_edge: float = 1.3
    persistence: int = 5
    cooldown: int = 30
    bg_alpha: float = 0.95

    def __post_init__(self):
        # extremes are allowed on purpose: theta_B > 1, beta_L = 0 or
        # alpha_edge = inf switch a cue off entirely
        checks = [
            ("alpha_entropy", 0.0 <= self.alpha_entropy <= 1.0),
            ("tau", 0.0 <= self.tau <= 255.0),
            ("theta_B", self.theta_B >= 0.0),
            ("n_hist", self.n_hist >= 0 and int(self.n_hist) == self.n_hist),
            ("theta_obstruction", self.theta_obstruction >= 0.0),
            ("theta_contour", 0.0 <= self.theta_contour <= 1.0),
            ("beta_L", 0.0 <= self.beta_L <= 1.0),
            ("eps_dct", self.eps_dct >= 0.0),
            ("eps_fft", self.eps_fft >= 0.0),
            ("alpha_edge", self.alpha_edge >= 0.0),
            ("persistence", self.persistence >= 1 and int(self.persistence) == self.persistence),
            ("cooldown", self.cooldown >= 0 and int(self.cooldown) == self.cooldown),
            ("bg_alpha", 0.0 <= self.bg_alpha <= 1.0),
        ]
        for name, ok in checks:
            value = getattr(self, name)
            if not ok or (isinstance(value, float) and math.isnan(value)):
                raise ConfigError(f"{name}={value!r} out of range")

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def with_overrides(self, **overrides) -> "DetectorConfig":
        unknown = set(overrides) - set(self.field_names())
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        coerced = {}
        for f in fields(self):
            if f.name in overrides:
                target = int if f.type in ("int", int) else float
                try:
                    coerced[f.name] = target(overrides[f.name])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{f.name}: {exc}") from exc
        return replace(self, **coerced)

    def to_dict(self) -> dict:
        return asdict(self)


def hist_window_sum(hist: np.ndarray, f0: int, n: int) -> int:
    """Counts in bins ``f0-n .. f0+n``, window clipped to [0, 255]."""
    return int(hist[max(0, f0 - n):min(255, f0 + n) + 1].sum())


class Detector:
    """Base class; subclasses implement :meth:`_step`."""

    detector_id = "base"

    def __init__(self, config: DetectorConfig | None = None):
        self.config = config or DetectorConfig()
        self.frames_seen = 0
        self._shape = None

    def step(self, frame: Frame) -> TamperEvent | None:
        if self._shape is None:
            self._shape = frame.shape
        elif frame.shape != self._shape:
            raise DomainError(f"frame shape {frame.shape} differs from stream shape {self._shape}")
        event = self._step(frame)
        self.frames_seen += 1
        return event

    def _step(self, frame: Frame) -> TamperEvent | None:
        raise NotImplementedError

    def run(self, frames: Iterable[Frame]) -> list[TamperEvent]:
        return [e for e in (self.step(f) for f in frames) if e is not None]

    def _event(self, kind: Kind, frame: Frame, score: float) -> TamperEvent:
        return TamperEvent(kind, frame.index, float(score), self.detector_id)


class EntropyOcclusionDetector(Detector):
    """Occlusion when frame entropy falls below ``alpha_entropy`` times the
    previous frame's entropy. Score is the entropy ratio."""

    detector_id = "alg1"

    def __init__(self, config=None):
        super().__init__(config)
        self.prev_entropy: float | None = None

    def _step(self, frame):
        e = imgproc.entropy(imgproc.histogram(frame))
        prev, self.prev_entropy = self.prev_entropy, e
        if prev is None:
            return None
        ratio = 1.0 if prev < ENTROPY_FLOOR else e / prev
        if ratio < self.config.alpha_entropy:
            return self._event(Kind.OCCLUSION, frame, ratio)
        return None


@dataclass(frozen=True)
class HuangPhases:
    """Outcome of the three phases of :class:`HuangDetector` for one frame pair."""

    changed_fraction: float
    gate: bool
    hist: bool
    edge: bool
    window_current: int
    window_delayed: int
    edges_current: int
    edges_delayed: int


def huang_phases(cfg: DetectorConfig, cur_luma, cur_hist, cur_edges: int,
                 ref_luma, ref_hist, ref_edges: int) -> HuangPhases:
    diff = frame_diff(cur_luma, ref_luma, cfg.tau)
    f0 = int(np.argmax(cur_hist))
    wc = hist_window_sum(cur_hist, f0, cfg.n_hist)
    wd = hist_window_sum(ref_hist, f0, cfg.n_hist)
    return HuangPhases(
        changed_fraction=diff.changed_fraction,
        gate=diff.changed_fraction > cfg.theta_B,
        hist=wc >= wd * cfg.theta_obstruction,
        edge=cur_edges <= ref_edges * cfg.theta_contour,
        window_current=wc,
        window_delayed=wd,
        edges_current=cur_edges,
        edges_delayed=ref_edges,
    )


class HuangDetector(Detector):
    """Three-phase occlusion/motion detector.

    Phase 1 gates on the fraction of pixels that changed by more than ``tau``
    against the previous frame. Phase 2 checks whether the histogram mass
    around the current peak grew by ``theta_obstruction``; phase 3 whether the
    Sobel edge count shrank to ``theta_contour`` of its previous value.
    Gate+hist+edge gives Occlusion (score: window growth); gate with neither
    gives Motion (score: changed fraction).
    """

    detector_id = "alg2"

    def __init__(self, config=None):
        super().__init__(config)
        self.prev = None  # (luma, hist, edge count)
        self.last_phases: HuangPhases | None = None

    def _step(self, frame):
        hist = imgproc.histogram(frame)
        edges = imgproc.edge_count(imgproc.edge_map(frame))
        prev, self.prev = self.prev, (frame.luma, hist, edges)
        if prev is None:
            return None
        ph = huang_phases(self.config, frame.luma, hist, edges, *prev)
        self.last_phases = ph
        if not ph.gate:
            return None
        if ph.hist and ph.edge:
            return self._event(Kind.OCCLUSION, frame, ph.window_current / max(ph.window_delayed, 1))
        if not ph.hist and not ph.edge:
            return self._event(Kind.MOTION, frame, ph.changed_fraction)
        return None


class _HFDefocusDetector(Detector):
    """Defocus when the high-frequency coefficient count drops below
    ``beta_L`` of the count on the first frame. Score is ``Q_t / Q_base``."""

    def __init__(self, config=None):
        super().__init__(config)
        self.q_base: int | None = None
        self.last_q: int | None = None

    def hf_count(self, frame) -> int:
        raise NotImplementedError

    def _step(self, frame):
        q = self.hf_count(frame)
        self.last_q = q
        if self.q_base is None:
            if q == 0:
                raise ConfigError(
                    f"{self.detector_id}: reference frame has no high-frequency content")
            self.q_base = q
            return None
        if q < self.q_base * self.config.beta_L:
            return self._event(Kind.DEFOCUS, frame, q / self.q_base)
        return None


class DCTDefocusDetector(_HFDefocusDetector):
    detector_id = "alg3"

    def hf_count(self, frame):
        return imgproc.count_hf_nonzero_dct(imgproc.dct2(frame), self.config.eps_dct)


class FFTDefocusDetector(_HFDefocusDetector):
    detector_id = "alg4"

    def hf_count(self, frame):
        return imgproc.count_hf_nonzero_fft(imgproc.fft2(frame), self.config.eps_fft)


def edge_change(cur_edges: np.ndarray, ref_edges: np.ndarray, alpha: float) -> tuple[bool, int, int]:
    """Edge-map disagreement test ``N_d > alpha * N``.

    Returns (fires, N_d, N) where N is the current edge count.
    """
    n = int(np.count_nonzero(cur_edges))
    nd = int(np.count_nonzero(cur_edges ^ ref_edges))
    return nd > alpha * n, nd, n


class EdgeTamperDetector(Detector):
    """Generic tamper when consecutive Otsu edge maps disagree on more than
    ``alpha_edge`` times the current edge count. Score is ``N_d / max(N, 1)``."""

    detector_id = "alg5"

    def __init__(self, config=None):
        super().__init__(config)
        self.prev_edges: np.ndarray | None = None

    def _step(self, frame):
        edges = imgproc.edge_map(frame)
        prev, self.prev_edges = self.prev_edges, edges
        if prev is None:
            return None
        fires, nd, n = edge_change(edges, prev, self.config.alpha_edge)
        if fires:
            return self._event(Kind.GENERIC, frame, nd / max(n, 1))
        return None


class PixelPositionMotionDetector(Detector):
    """Motion when more than ``theta_B`` of all pixels deviate from the running
    background by over ``tau``. Score is the deviating fraction."""

    detector_id = "motion"

    def __init__(self, config=None):
        super().__init__(config)
        self.model = BackgroundModel(alpha=self.config.bg_alpha)

    def _step(self, frame):
        event = None
        if self.model.initialized:
            count = int(np.count_nonzero(self.model.deviation(frame) > self.config.tau))
            total = frame.luma.size
            if count > self.config.theta_B * total:
                event = self._event(Kind.MOTION, frame, count / total)
        self.model.update(frame)
        return event


@dataclass(frozen=True)
class FrameCues:
    """Everything the combined detector measured on one frame."""

    gate: bool
    gate_score: float
    edge_fires: bool
    huang: HuangPhases
    hf_count: int
    defocus: bool
    candidate: Kind | None


class CombinedDetector(Detector):
    """Fusion of the edge-change, three-phase and DCT detectors.

    Each frame is compared with a reference: the last frame judged normal.
    The reference stays frozen while the view looks tampered, so a sustained
    tamper keeps registering instead of only at its onset.

    A frame is suspicious when any cue fires against the reference:
    edge-map disagreement, more than ``theta_B`` of pixels changed,
    histogram-peak growth, or DCT high-frequency loss against the first
    frame. Suspicious frames are classified as

    * Occlusion: histogram growth, with either edge collapse or a localized
      change (changed fraction at most ``theta_B`` and the DCT count intact);
    * Defocus: otherwise, if the DCT count fell below ``beta_L * Q_base``;
    * Motion: otherwise.

    One event is emitted once the same class has held for ``persistence``
    consecutive frames (score: mean edge-change ratio over those frames).
    After that the alarm latches until a frame matches the reference again,
    and no new event is emitted for ``cooldown`` frames.
    """

    detector_id = "combined"

    def __init__(self, config=None):
        super().__init__(config)
        self.ref = None  # (luma, hist, edge map, edge count)
        self.q_base: int | None = None
        self.run_kind: Kind | None = None
        self.run_scores: list[float] = []
        self.alarmed = False
        self.cooldown_left = 0
        self.last_cues: FrameCues | None = None

    def _measure(self, frame):
        hist = imgproc.histogram(frame)
        edges = imgproc.edge_map(frame)
        return frame.luma, hist, edges, int(np.count_nonzero(edges))

    def cues(self, frame, measured=None) -> FrameCues:
        cfg = self.config
        luma, hist, edges, n = measured or self._measure(frame)
        r_luma, r_hist, r_edges, r_n = self.ref
        edge_fires, nd, _ = edge_change(edges, r_edges, cfg.alpha_edge)
        ph = huang_phases(cfg, luma, hist, n, r_luma, r_hist, r_n)
        q = imgproc.count_hf_nonzero_dct(imgproc.dct2(luma), cfg.eps_dct)
        defocus = q < self.q_base * cfg.beta_L
        gate = edge_fires or ph.gate or ph.hist or defocus
        candidate = None
        if gate:
            if ph.hist and (ph.edge or not (ph.gate or defocus)):
                candidate = Kind.OCCLUSION
            elif defocus:
                candidate = Kind.DEFOCUS
            else:
                candidate = Kind.MOTION
        return FrameCues(gate, nd / max(n, 1), edge_fires, ph, q, defocus, candidate)

    def _step(self, frame):
        measured = self._measure(frame)
        if self.ref is None:
            q = imgproc.count_hf_nonzero_dct(imgproc.dct2(frame), self.config.eps_dct)
            if q == 0:
                raise ConfigError("combined: reference frame has no high-frequency content")
            self.q_base = q
            self.ref = measured
            return None

        c = self.cues(frame, measured)
        self.last_cues = c
        suppressed = self.cooldown_left > 0
        if suppressed:
            self.cooldown_left -= 1

        if not c.gate:
            self.alarmed = False
            self.run_kind, self.run_scores = None, []
            self.ref = measured
            return None
        if self.alarmed:
            return None

        if c.candidate != self.run_kind:
            self.run_kind, self.run_scores = c.candidate, []
        self.run_scores.append(c.gate_score)
        if len(self.run_scores) < self.config.persistence or suppressed:
            return None

        score = float(np.mean(self.run_scores))
        kind = self.run_kind
        self.alarmed = True
        self.cooldown_left = self.config.cooldown
        self.run_kind, self.run_scores = None, []
        return self._event(kind, frame, score)


DETECTORS = {
    "alg1": EntropyOcclusionDetector,
    "alg2": HuangDetector,
    "alg3": DCTDefocusDetector,
    "alg4": FFTDefocusDetector,
    "alg5": EdgeTamperDetector,
    "motion": PixelPositionMotionDetector,
    "combined": CombinedDetector,
}


def make_detector(detector_id: str, config: DetectorConfig | None = None) -> Detector:
    try:
        cls = DETECTORS[detector_id]
    except KeyError:
        raise ConfigError(f"unknown detector {detector_id!r}; "
                          f"choose from {', '.join(DETECTORS)}") from None
    return cls(config)


def run_detector(detector_id: str, frames: Iterable[Frame],
                 config: DetectorConfig | None = None) -> list[TamperEvent]:
    return make_detector(detector_id, config).run(frames)


def run_detectors(frames: Iterable[Frame], detector_ids: Iterable[str],
                  config: DetectorConfig | None = None) -> list[TamperEvent]:
    """Run several detectors side by side over one stream.

    Events come out in frame order, and in ``detector_ids`` order within a frame.
    """
    dets = [make_detector(d, config) for d in detector_ids]
    if not dets:
        raise ConfigError("no detector selected")
    events = []
    for frame in frames:
        for det in dets:
            ev = det.step(frame)
            if ev is not None:
                events.append(ev)
    return events
