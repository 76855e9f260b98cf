"""Grayscale frame type and decoders for PGM, PGM directories and Y4M.

Everything downstream works on 8-bit luma. Colour input is reduced to luma
at the boundary (BT.601 weights); Y4M chroma planes are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError, FormatError, TruncatedError, UnsupportedError

__all__ = [
    "Frame",
    "FrameStream",
    "load_pgm",
    "save_pgm",
    "open_y4m",
    "write_y4m",
    "open_pgm_dir",
    "write_pgm_dir",
    "open_stream",
    "rgb_to_luma",
    "PGM_NAME_FORMAT",
]

PGM_NAME_FORMAT = "frame_{:06d}.pgm"

# BT.601 luma weights
_LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_Y4M_420 = {"420", "420jpeg", "420paldv", "420mpeg2"}


@dataclass(frozen=True, eq=False)
class Frame:
    """One 8-bit grayscale frame.

    ``luma`` is a read-only ``(height, width)`` uint8 array in row-major order.
    """

    luma: np.ndarray
    index: int = 0

    def __post_init__(self):
        luma = np.asarray(self.luma)
        if luma.ndim != 2 or luma.shape[0] < 1 or luma.shape[1] < 1:
            raise DomainError(f"luma must be a non-empty 2-D grid, got shape {luma.shape}")
        if luma.dtype != np.uint8:
            if np.issubdtype(luma.dtype, np.integer) or np.issubdtype(luma.dtype, np.floating):
                if luma.size and (luma.min() < 0 or luma.max() > 255):
                    raise DomainError("intensities must lie in [0, 255]")
                luma = luma.astype(np.uint8)
            else:
                raise DomainError(f"unsupported luma dtype {luma.dtype}")
        if self.index < 0:
            raise DomainError("frame index must be non-negative")
        luma = np.ascontiguousarray(luma)
        luma.setflags(write=False)
        object.__setattr__(self, "luma", luma)

    @property
    def width(self) -> int:
        return self.luma.shape[1]

    @property
    def height(self) -> int:
        return self.luma.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.luma.shape

    def with_index(self, index: int) -> "Frame":
        return Frame(self.luma, index)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.luma, other.luma)

    def __repr__(self):
        return f"Frame(index={self.index}, width={self.width}, height={self.height})"


class FrameStream:
    """Sequential, single-consumer iterator over frames of fixed size.

    ``frames`` is any iterable of 2-D uint8 arrays or Frames; indices are
    reassigned 0, 1, 2, ... in yield order.
    """

    def __init__(self, frames: Iterable, width: int, height: int,
                 source: str = "<memory>", fps: str | None = None):
        self._frames = frames
        self.width = width
        self.height = height
        self.source = source
        self.fps = fps

    def __iter__(self) -> Iterator[Frame]:
        for i, item in enumerate(self._frames):
            luma = item.luma if isinstance(item, Frame) else item
            frame = Frame(luma, i)
            if frame.shape != (self.height, self.width):
                raise FormatError(
                    f"{self.source}: frame {i} is {frame.width}x{frame.height}, "
                    f"stream declares {self.width}x{self.height}")
            yield frame

    def __repr__(self):
        return f"FrameStream({self.source!r}, {self.width}x{self.height})"


def rgb_to_luma(r, g, b):
    """BT.601 luma, rounded half-up and clamped to [0, 255].

    Works elementwise on scalars or arrays.
    """
    wr, wg, wb = _LUMA_WEIGHTS
    y = wr * np.asarray(r, dtype=np.float64) + wg * np.asarray(g, dtype=np.float64) \
        + wb * np.asarray(b, dtype=np.float64)
    y = np.clip(np.floor(y + 0.5), 0, 255)
    if y.ndim == 0:
        return int(y)
    return y.astype(np.uint8)


# -- PGM ---------------------------------------------------------------------

_WS = b" \t\r\n\v\f"


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WS:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WS and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise FormatError("PGM header ended early")
        tokens.append(data[start:pos])
    if pos >= n or data[pos] not in _WS:
        raise FormatError("PGM header must end with a single whitespace byte")
    return tokens, pos + 1


def decode_pgm(data: bytes, index: int = 0, source: str = "<bytes>") -> Frame:
    if data[:2] != b"P5":
        raise FormatError(f"{source}: not a binary PGM (magic {data[:2]!r})")
    magic, w, h, maxval = None, None, None, None
    try:
        (magic, w, h, maxval), offset = _pgm_tokens(data, 4)
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{source}: bad PGM header") from exc
    if magic != b"P5":
        raise FormatError(f"{source}: bad magic {magic!r}")
    if w < 1 or h < 1:
        raise FormatError(f"{source}: non-positive dimensions {w}x{h}")
    if maxval != 255:
        raise UnsupportedError(f"{source}: maxval {maxval} unsupported (only 255)")
    payload = data[offset:offset + w * h]
    if len(payload) < w * h:
        raise TruncatedError(f"{source}: expected {w * h} payload bytes, got {len(payload)}")
    luma = np.frombuffer(payload, dtype=np.uint8).reshape(h, w)
    return Frame(luma, index)


def encode_pgm(frame: Frame) -> bytes:
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.luma.tobytes()


def load_pgm(path, index: int = 0) -> Frame:
    """Decode a binary (P5) PGM file with maxval 255."""
    data = Path(path).read_bytes()
    return decode_pgm(data, index, str(path))


def save_pgm(frame: Frame, path) -> None:
    Path(path).write_bytes(encode_pgm(frame))


def open_pgm_dir(path) -> FrameStream:
    """Stream the ``*.pgm`` files of a directory in lexicographic order."""
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"no such directory: {path}")
    files = sorted(p for p in path.iterdir() if p.suffix == ".pgm")
    if not files:
        raise FormatError(f"{path}: no .pgm files")
    first = load_pgm(files[0])

    def frames():
        yield first.luma
        for f in files[1:]:
            yield load_pgm(f).luma

    return FrameStream(frames(), first.width, first.height, source=str(path))


def write_pgm_dir(frames: Iterable, path) -> int:
    """Write frames as ``frame_000000.pgm``, ``frame_000001.pgm``, ...

    Returns the number of files written.
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    n = 0
    for i, item in enumerate(frames):
        frame = item if isinstance(item, Frame) else Frame(item, i)
        save_pgm(frame, path / PGM_NAME_FORMAT.format(i))
        n += 1
    return n


# -- Y4M ---------------------------------------------------------------------

def _parse_y4m_header(line: bytes, source: str) -> dict:
    parts = line.split(b" ")
    if parts[0] != b"YUV4MPEG2":
        raise FormatError(f"{source}: missing YUV4MPEG2 signature")
    params = {"C": "420jpeg"}
    for token in parts[1:]:
        if not token:
            continue
        key, value = chr(token[0]), token[1:].decode("ascii", "replace")
        params[key] = value
    try:
        params["W"] = int(params["W"])
        params["H"] = int(params["H"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{source}: Y4M header lacks valid W/H") from exc
    if params["W"] < 1 or params["H"] < 1:
        raise FormatError(f"{source}: non-positive dimensions")
    return params


def _chroma_bytes(colorspace: str, w: int, h: int, source: str) -> int:
    if colorspace == "mono":
        return 0
    if colorspace in _Y4M_420:
        return 2 * ((w + 1) // 2) * ((h + 1) // 2)
    raise UnsupportedError(f"{source}: colorspace C{colorspace} unsupported")


def open_y4m(path) -> FrameStream:
    """Open a YUV4MPEG2 file and stream its luma planes.

    Accepts 4:2:0 variants and ``Cmono``; anything else raises
    :class:`UnsupportedError` before any frame is read.
    """
    path = Path(path)
    fh = open(path, "rb")
    try:
        header = fh.readline()
        if not header.endswith(b"\n"):
            raise FormatError(f"{path}: unterminated Y4M header")
        params = _parse_y4m_header(header.rstrip(b"\n"), str(path))
        w, h = params["W"], params["H"]
        chroma = _chroma_bytes(params["C"], w, h, str(path))
    except Exception:
        fh.close()
        raise

    def frames():
        with fh:
            while True:
                marker = fh.readline()
                if not marker:
                    return
                if not marker.startswith(b"FRAME"):
                    raise FormatError(f"{path}: expected FRAME marker, got {marker[:16]!r}")
                luma = fh.read(w * h)
                if len(luma) < w * h:
                    raise TruncatedError(f"{path}: truncated luma plane")
                if chroma and len(fh.read(chroma)) < chroma:
                    raise TruncatedError(f"{path}: truncated chroma planes")
                yield np.frombuffer(luma, dtype=np.uint8).reshape(h, w)

    return FrameStream(frames(), w, h, source=str(path), fps=params.get("F"))


def write_y4m(frames: Iterable, path, colorspace: str = "420jpeg", fps: str = "25:1") -> int:
    """Write frames as Y4M; chroma planes (if any) are neutral grey (128)."""
    frames = [f if isinstance(f, Frame) else Frame(f) for f in frames]
    if not frames:
        raise DomainError("cannot write an empty Y4M stream")
    w, h = frames[0].width, frames[0].height
    chroma = _chroma_bytes(colorspace, w, h, str(path))
    with open(path, "wb") as fh:
        fh.write(f"YUV4MPEG2 W{w} H{h} F{fps} Ip A1:1 C{colorspace}\n".encode("ascii"))
        for f in frames:
            if f.shape != (h, w):
                raise DomainError("all frames must share dimensions")
            fh.write(b"FRAME\n")
            fh.write(f.luma.tobytes())
            fh.write(b"\x80" * chroma)
    return len(frames)


def open_stream(path) -> FrameStream:
    """Open a PGM directory, a single PGM file or a Y4M file by inspection."""
    path = Path(path)
    if path.is_dir():
        return open_pgm_dir(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, "rb") as fh:
        magic = fh.read(9)
    if magic.startswith(b"YUV4MPEG2"):
        return open_y4m(path)
    if magic.startswith(b"P5"):
        frame = load_pgm(path)
        return FrameStream([frame.luma], frame.width, frame.height, source=str(path))
    raise FormatError(f"{path}: unrecognised frame source")
