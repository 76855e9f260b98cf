"""Stateless image primitives used by the detectors.

Functions accept a :class:`~camtamper.frame_io.Frame` or a bare 2-D array.
Binary maps are boolean arrays; spectra are float (DCT) or complex (FFT)
arrays with the frame's shape.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.fft

from .errors import DomainError
from .frame_io import Frame

__all__ = [
    "as_array",
    "histogram",
    "entropy",
    "sobel_magnitude",
    "otsu_threshold",
    "edge_map",
    "edge_count",
    "dct2",
    "idct2",
    "fft2",
    "ifft2",
    "dct_hf_region",
    "fft_hf_region",
    "count_hf_nonzero_dct",
    "count_hf_nonzero_fft",
    "box_blur",
]

OTSU_BINS = 256


def as_array(frame) -> np.ndarray:
    return frame.luma if isinstance(frame, Frame) else np.asarray(frame)


def histogram(frame) -> np.ndarray:
    """256-bin intensity counts (int64)."""
    luma = as_array(frame)
    return np.bincount(luma.ravel(), minlength=256).astype(np.int64)


def entropy(hist) -> float:
    """Shannon entropy in bits of a histogram of counts."""
    hist = np.asarray(hist, dtype=np.float64)
    total = hist.sum()
    if total <= 0:
        raise DomainError("entropy of an empty histogram is undefined")
    p = hist[hist > 0] / total
    return float(max(0.0, -np.sum(p * np.log2(p))))


def sobel_magnitude(frame) -> np.ndarray:
    """Gradient magnitude from the 3x3 Sobel kernels.

    The one-pixel border is zero. Returns float32 (exact for 8-bit input up to
    float32 rounding of the final square root).
    """
    a = as_array(frame)
    if a.ndim != 2 or a.shape[0] < 3 or a.shape[1] < 3:
        raise DomainError("Sobel needs a frame of at least 3x3")
    a = a.astype(np.int32)
    # separable: smooth [1,2,1] along one axis, difference [-1,0,1] along the other
    rows_s = a[:-2, :] + 2 * a[1:-1, :] + a[2:, :]
    gx = rows_s[:, 2:] - rows_s[:, :-2]
    cols_s = a[:, :-2] + 2 * a[:, 1:-1] + a[:, 2:]
    gy = cols_s[2:, :] - cols_s[:-2, :]
    out = np.zeros(a.shape, dtype=np.float32)
    mag2 = (gx * gx + gy * gy).astype(np.float32)
    out[1:-1, 1:-1] = np.sqrt(mag2)
    return out


def _quantize(values: np.ndarray, vmax: float) -> np.ndarray:
    idx = (values.astype(np.float64) * (OTSU_BINS / vmax)).astype(np.int64)
    return np.minimum(idx, OTSU_BINS - 1)


def otsu_threshold(values) -> float:
    """Otsu threshold over a 256-bin quantization of ``[0, max]``.

    Bin ``b`` covers ``[b*max/256, (b+1)*max/256)``. The cut between bins ``t``
    and ``t+1`` that maximizes between-class variance wins (lowest ``t`` on
    ties) and the returned threshold is the lower edge of bin ``t+1``.
    An all-equal grid returns that value.
    """
    v = np.asarray(values)
    if v.size == 0:
        raise DomainError("Otsu threshold of an empty grid")
    vmin, vmax = float(v.min()), float(v.max())
    if vmin < 0:
        raise DomainError("Otsu threshold expects non-negative values")
    if vmin == vmax:
        return vmax
    counts = np.bincount(_quantize(v.ravel(), vmax), minlength=OTSU_BINS).astype(np.float64)
    levels = np.arange(OTSU_BINS, dtype=np.float64)
    total = counts.sum()
    w0 = np.cumsum(counts)[:-1]
    s0 = np.cumsum(counts * levels)[:-1]
    w1 = total - w0
    s1 = s0[-1] + counts[-1] * levels[-1] - s0
    with np.errstate(divide="ignore", invalid="ignore"):
        between = w0 * w1 * (s0 / w0 - s1 / w1) ** 2
    between = np.where((w0 > 0) & (w1 > 0), between, -1.0)
    t = int(np.argmax(between))
    return (t + 1) * vmax / OTSU_BINS


def edge_map(frame) -> np.ndarray:
    """Sobel magnitude binarized at its Otsu threshold.

    Pixels with zero gradient are never edges, so a flat frame has an empty map.
    """
    mag = sobel_magnitude(frame)
    thr = otsu_threshold(mag)
    return (mag >= thr) & (mag > 0)


def edge_count(edges: np.ndarray) -> int:
    return int(np.count_nonzero(edges))


def dct2(frame) -> np.ndarray:
    """Orthonormal 2-D DCT-II."""
    return scipy.fft.dctn(as_array(frame).astype(np.float64), type=2, norm="ortho")


def idct2(coeffs) -> np.ndarray:
    return scipy.fft.idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")


def fft2(frame) -> np.ndarray:
    """2-D DFT with the 1/(MN) factor on the forward pass."""
    a = as_array(frame).astype(np.float64)
    return np.fft.fft2(a) / a.size


def ifft2(spectrum) -> np.ndarray:
    """Inverse of :func:`fft2` (no normalization on this pass)."""
    s = np.asarray(spectrum)
    return np.fft.ifft2(s) * s.size


def dct_hf_region(shape) -> tuple[slice, slice]:
    """Bottom-right quadrant, starting at ceil(M/2), ceil(N/2)."""
    m, n = shape
    return slice(math.ceil(m / 2), m), slice(math.ceil(n / 2), n)


def fft_hf_region(shape) -> np.ndarray:
    """Boolean mask of the FFT high-frequency region, in unshifted layout.

    After shifting DC to (M//2, N//2) a coefficient is high-frequency when its
    Chebyshev distance from DC exceeds min(M, N)/4.
    """
    m, n = shape
    # fftshift sends unshifted index i to position (i + m//2) % m
    du = np.abs((np.arange(m) + m // 2) % m - m // 2)
    dv = np.abs((np.arange(n) + n // 2) % n - n // 2)
    dist = np.maximum(du[:, None], dv[None, :])
    return dist > min(m, n) / 4


def count_hf_nonzero_dct(spec, eps: float = 1.0) -> int:
    """Coefficients in the bottom-right quadrant with ``|C| > eps``."""
    spec = np.asarray(spec)
    rows, cols = dct_hf_region(spec.shape)
    return int(np.count_nonzero(np.abs(spec[rows, cols]) > eps))


def count_hf_nonzero_fft(spec, eps: float = 1.0) -> int:
    """High-frequency FFT coefficients whose magnitude exceeds ``eps``.

    Magnitudes are compared on the orthonormal scale (``|F| * sqrt(MN)``) so a
    given ``eps`` means the same thing here as in :func:`count_hf_nonzero_dct`.
    """
    spec = np.asarray(spec)
    mag = np.abs(spec) * math.sqrt(spec.size)
    return int(np.count_nonzero((mag > eps) & fft_hf_region(spec.shape)))


def box_blur(frame, radius: int):
    """(2r+1)x(2r+1) mean filter, edge-clamped, rounded half-up.

    Integer arithmetic throughout. Returns the same type it was given
    (Frame in, Frame out).
    """
    if radius < 0:
        raise DomainError("blur radius must be non-negative")
    a = as_array(frame)
    if radius == 0:
        out = a.copy()
    else:
        k = 2 * radius + 1
        p = np.pad(a.astype(np.int64), radius, mode="edge")
        c = np.cumsum(p, axis=0)
        c = np.concatenate([np.zeros((1, c.shape[1]), np.int64), c], axis=0)
        rows = c[k:, :] - c[:-k, :]
        c = np.cumsum(rows, axis=1)
        c = np.concatenate([np.zeros((c.shape[0], 1), np.int64), c], axis=1)
        sums = c[:, k:] - c[:, :-k]
        area = k * k
        out = ((2 * sums + area) // (2 * area)).astype(np.uint8)
    if isinstance(frame, Frame):
        return Frame(out, frame.index)
    return out
