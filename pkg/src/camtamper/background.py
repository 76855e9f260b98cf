"""Temporal scene models: frame differencing and a running Gaussian background."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StateError
from .imgproc import as_array

__all__ = ["DiffResult", "frame_diff", "BackgroundModel", "MaskPair",
           "DEFAULT_ALPHA", "DEFAULT_V_INIT", "DEFAULT_TAU", "MATCH_SIGMAS"]

DEFAULT_ALPHA = 0.95
DEFAULT_V_INIT = 10.0 ** 2
DEFAULT_TAU = 25
MATCH_SIGMAS = 2.5


@dataclass(frozen=True)
class DiffResult:
    mask: np.ndarray
    changed_count: int
    changed_fraction: float


def frame_diff(current, delayed, tau: float = DEFAULT_TAU) -> DiffResult:
    """Pixels whose absolute intensity change exceeds ``tau``."""
    a = as_array(current)
    b = as_array(delayed)
    if a.shape != b.shape:
        raise DomainError(f"frame shapes differ: {a.shape} vs {b.shape}")
    if not 0 <= tau <= 255:
        raise DomainError("tau must lie in [0, 255]")
    mask = np.abs(a.astype(np.int16) - b.astype(np.int16)) > tau
    count = int(np.count_nonzero(mask))
    return DiffResult(mask, count, count / mask.size)


@dataclass(frozen=True)
class MaskPair:
    """``match`` marks pixels within 2.5 sigma of the background;
    ``foreground`` is its complement."""

    match: np.ndarray
    foreground: np.ndarray


class BackgroundModel:
    """Per-pixel running mean ``F`` and variance ``v``.

    Each update blends the new frame in with weight ``1 - alpha``; the
    variance update uses the freshly updated mean.
    """

    def __init__(self, alpha: float = DEFAULT_ALPHA, v_init: float = DEFAULT_V_INIT):
        if not 0.0 <= alpha <= 1.0:
            raise DomainError("alpha must lie in [0, 1]")
        if v_init < 0:
            raise DomainError("v_init must be non-negative")
        self.alpha = alpha
        self.v_init = v_init
        self.F: np.ndarray | None = None
        self.v: np.ndarray | None = None

    @property
    def initialized(self) -> bool:
        return self.F is not None

    def _check(self, img: np.ndarray):
        if img.shape != self.F.shape:
            raise DomainError(f"frame shape {img.shape} does not match model {self.F.shape}")

    def update(self, frame) -> "BackgroundModel":
        img = as_array(frame).astype(np.float64)
        if not self.initialized:
            self.F = img.copy()
            self.v = np.full(img.shape, float(self.v_init))
            return self
        self._check(img)
        a = self.alpha
        self.F = a * self.F + (1.0 - a) * img
        self.v = a * self.v + (1.0 - a) * (self.F - img) ** 2
        return self

    def deviation(self, frame) -> np.ndarray:
        if not self.initialized:
            raise StateError("background model has not seen a frame yet")
        img = as_array(frame).astype(np.float64)
        self._check(img)
        return np.abs(img - self.F)

    def foreground_mask(self, frame) -> MaskPair:
        """Classify ``frame`` against the current model."""
        match = self.deviation(frame) < MATCH_SIGMAS * np.sqrt(self.v)
        return MaskPair(match, ~match)
