"""Embedded oracle checks, runnable from an installed package.

Each check compares a primitive against an independent computation (naive
DFT, cosine-basis DCT, direct entropy sum, unrolled recurrence). The bench
check times the combined detector on 640x480 frames.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import imgproc
from .background import BackgroundModel
from .detectors import CombinedDetector
from .kinds import Kind
from .synth import Scenario, TamperSpec, generate_scenario

__all__ = ["naive_dft2", "naive_dct2", "run_selftest", "BENCH_MIN_FPS"]

BENCH_MIN_FPS = 15.0


def naive_dft2(f: np.ndarray) -> np.ndarray:
    """Direct O(M^2 N^2) forward DFT with the 1/(MN) factor."""
    m, n = f.shape
    out = np.zeros((m, n), dtype=complex)
    x = np.arange(m)[:, None]
    y = np.arange(n)[None, :]
    for u in range(m):
        for v in range(n):
            out[u, v] = np.sum(f * np.exp(-2j * np.pi * (u * x / m + v * y / n)))
    return out / (m * n)


def _dct_basis(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    c[0, :] = math.sqrt(1.0 / n)
    return c


def naive_dct2(f: np.ndarray) -> np.ndarray:
    """Orthonormal DCT-II from explicit cosine basis matrices."""
    m, n = f.shape
    return _dct_basis(m) @ f.astype(np.float64) @ _dct_basis(n).T


def _check(results, name, ok, detail=""):
    results.append((name, bool(ok), detail))


def run_selftest(bench: bool = False, perturb_dct: bool = False, seed: int = 0):
    """Return ``[(check_name, passed, detail), ...]``.

    ``perturb_dct`` scales the DCT output by 1.01 before the checks, which
    must make the Parseval and round-trip checks fail.
    """
    rng = np.random.default_rng(seed)
    results = []
    scale = 1.01 if perturb_dct else 1.0

    f8 = rng.integers(0, 256, (8, 8)).astype(np.float64)
    err = np.max(np.abs(imgproc.fft2(f8) - naive_dft2(f8)))
    _check(results, "fft2_vs_naive_dft", err < 1e-9, f"max_abs={err:.3g}")

    f = rng.integers(0, 256, (48, 64)).astype(np.float64)
    err = np.max(np.abs(imgproc.ifft2(imgproc.fft2(f)).real - f))
    _check(results, "fft2_roundtrip", err < 1e-9, f"max_abs={err:.3g}")

    c = imgproc.dct2(f) * scale
    err = np.max(np.abs(imgproc.idct2(c) - f))
    _check(results, "dct2_roundtrip", err < 1e-9, f"max_abs={err:.3g}")
    rel = abs(np.sum(c ** 2) - np.sum(f ** 2)) / np.sum(f ** 2)
    _check(results, "dct2_parseval", rel < 1e-9, f"rel={rel:.3g}")
    err = np.max(np.abs(imgproc.dct2(f8) * scale - naive_dct2(f8)))
    _check(results, "dct2_vs_cosine_basis", err < 1e-9, f"max_abs={err:.3g}")

    const = np.full((16, 16), 77, np.uint8)
    _check(results, "entropy_constant", imgproc.entropy(imgproc.histogram(const)) == 0.0)
    uni = np.arange(256, dtype=np.uint8).reshape(16, 16)
    e = imgproc.entropy(imgproc.histogram(uni))
    _check(results, "entropy_uniform_256", abs(e - 8.0) < 1e-12, f"E={e!r}")
    hist = rng.integers(0, 50, 256)
    p = hist[hist > 0] / hist.sum()
    direct = -sum(float(q) * math.log2(float(q)) for q in p)
    _check(results, "entropy_vs_direct_sum", abs(imgproc.entropy(hist) - direct) < 1e-12)
    img = rng.integers(0, 256, (32, 32), dtype=np.uint8)
    _check(results, "histogram_total", int(imgproc.histogram(img).sum()) == img.size)

    _check(results, "sobel_constant_zero", not np.any(imgproc.sobel_magnitude(const)))

    stream = rng.integers(0, 256, (10, 4, 4)).astype(np.float64)
    model = BackgroundModel(alpha=0.95, v_init=100.0)
    F, v = stream[0].copy(), np.full((4, 4), 100.0)
    for t, s in enumerate(stream):
        model.update(s)
        if t:
            F = 0.95 * F + 0.05 * s
            v = 0.95 * v + 0.05 * (F - s) ** 2
    err = max(np.max(np.abs(model.F - F)), np.max(np.abs(model.v - v)))
    _check(results, "background_recurrence", err < 1e-9, f"max_abs={err:.3g}")

    if bench:
        fps = bench_combined()
        _check(results, "bench_combined_640x480", fps >= BENCH_MIN_FPS, f"fps={fps:.1f}")
    return results


def bench_combined(n_frames: int = 60, width: int = 640, height: int = 480) -> float:
    """Frames per second of the combined detector on a synthetic clip.

    The clip includes an occlusion so the tampered code path is timed too.
    """
    sc = Scenario({"width": width, "height": height, "length": n_frames},
                  [TamperSpec(Kind.OCCLUSION, n_frames // 2, n_frames - 1,
                              {"rect": [0, 0, width, height], "fill": 0})], 0, "bench")
    stream, _ = generate_scenario(sc)
    frames = list(stream)
    det = CombinedDetector()
    t0 = time.perf_counter()
    for fr in frames:
        det.step(fr)
    return len(frames) / (time.perf_counter() - t0)
