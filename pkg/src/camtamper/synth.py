"""Synthetic clips with scripted tamper injections and their ground truth.

A :class:`Scenario` pairs a base (procedural scene or frames on disk) with a
list of tamper events. Rendering is deterministic in the seed: the static
texture comes from ``seed`` and the per-frame sensor noise from
``(seed, frame_index)``, so any frame can be rendered on its own.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DomainError, ValidationError
from .frame_io import Frame, FrameStream, open_stream, write_pgm_dir
from .imgproc import as_array, box_blur
from .kinds import TAMPER_KINDS, Kind

__all__ = [
    "Kind",
    "TamperSpec",
    "Interval",
    "GroundTruth",
    "Scenario",
    "apply_occlusion",
    "apply_defocus",
    "apply_shift",
    "generate_scenario",
    "render_texture",
    "load_scenario",
    "scenario_from_dict",
    "write_scenario",
    "standard_corpus",
    "glitch_corpus",
    "large_object_clip",
    "DEFAULT_NOISE",
]

DEFAULT_NOISE = 2
DEFAULT_SQUARE = {"size": 0.1, "fill": 245, "vx": 3, "vy": 2}


# -- transforms ----------------------------------------------------------------

def _wrap(frame, out):
    if isinstance(frame, Frame):
        return Frame(out, frame.index)
    return out


def apply_occlusion(frame, rect, fill: int):
    """Paint ``rect = (x, y, w, h)`` with a constant intensity."""
    a = as_array(frame)
    x, y, w, h = (int(v) for v in rect)
    if w < 0 or h < 0 or x < 0 or y < 0 or x + w > a.shape[1] or y + h > a.shape[0]:
        raise DomainError(f"occlusion rect {rect} outside {a.shape[1]}x{a.shape[0]} frame")
    if not 0 <= fill <= 255:
        raise DomainError("fill must lie in [0, 255]")
    out = a.copy()
    out[y:y + h, x:x + w] = fill
    return _wrap(frame, out)


def apply_defocus(frame, radius: int):
    """Three passes of a box blur, a cheap stand-in for a Gaussian lens blur."""
    if radius < 1:
        raise DomainError("defocus radius must be at least 1")
    out = frame
    for _ in range(3):
        out = box_blur(out, radius)
    return out


def apply_shift(frame, dx: int, dy: int, fill: int | None = 0):
    """Translate content by ``(dx, dy)``.

    The uncovered border gets the constant ``fill``; ``fill=None`` wraps the
    content around instead, so the border shows scene content rather than a
    flat band.
    """
    a = as_array(frame)
    h, w = a.shape
    if abs(dx) >= w or abs(dy) >= h:
        raise DomainError(f"shift ({dx}, {dy}) too large for {w}x{h} frame")
    if fill is None:
        return _wrap(frame, np.roll(a, (dy, dx), axis=(0, 1)))
    out = np.full_like(a, fill)
    src_x = slice(max(0, -dx), w - max(0, dx))
    dst_x = slice(max(0, dx), w - max(0, -dx))
    src_y = slice(max(0, -dy), h - max(0, dy))
    dst_y = slice(max(0, dy), h - max(0, -dy))
    out[dst_y, dst_x] = a[src_y, src_x]
    return _wrap(frame, out)


# -- scenario model ------------------------------------------------------------

@dataclass(frozen=True)
class TamperSpec:
    kind: Kind
    start: int
    end: int
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Interval:
    kind: Kind
    start: int
    end: int


@dataclass(frozen=True)
class GroundTruth:
    intervals: tuple[Interval, ...]
    length: int = 0
    name: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "length": self.length,
            "events": [{"kind": iv.kind.value, "start": iv.start, "end": iv.end}
                       for iv in self.intervals],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroundTruth":
        try:
            intervals = tuple(Interval(Kind(e["kind"]), int(e["start"]), int(e["end"]))
                              for e in d["events"])
            return cls(intervals, int(d.get("length", 0)), str(d.get("name", "")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad ground-truth document: {exc}") from exc

    def tampered_frames(self) -> set[int]:
        out = set()
        for iv in self.intervals:
            out.update(range(iv.start, iv.end + 1))
        return out


@dataclass
class Scenario:
    """A base scene plus scripted tamper events.

    ``base`` is either a dict describing a procedural scene (see
    :func:`render_base_frame`) or a path to a PGM directory / Y4M file.
    """

    base: Any
    events: list[TamperSpec] = field(default_factory=list)
    seed: int = 0
    name: str = "scenario"

    @property
    def length(self) -> int:
        if isinstance(self.base, dict):
            return int(self.base.get("length", 300))
        return sum(1 for _ in open_stream(self.base))

    def validate(self) -> None:
        n = self.length
        by_kind: dict[Kind, list[TamperSpec]] = {}
        for i, ev in enumerate(self.events):
            if ev.kind not in TAMPER_KINDS:
                raise ValidationError(f"events[{i}]: kind {ev.kind!r} cannot be injected")
            if not 0 <= ev.start <= ev.end < n:
                raise ValidationError(
                    f"events[{i}]: interval [{ev.start}, {ev.end}] outside stream of {n} frames")
            by_kind.setdefault(ev.kind, []).append(ev)
        for kind, evs in by_kind.items():
            evs = sorted(evs, key=lambda e: e.start)
            for a, b in zip(evs, evs[1:]):
                if b.start <= a.end:
                    raise ValidationError(
                        f"overlapping {kind.value} events [{a.start}, {a.end}] and [{b.start}, {b.end}]")

    def ground_truth(self) -> GroundTruth:
        return GroundTruth(tuple(Interval(e.kind, e.start, e.end) for e in self.events),
                           self.length, self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "base": self.base if isinstance(self.base, dict) else str(self.base),
            "events": [{"kind": e.kind.value, "start": e.start, "end": e.end,
                        "params": e.params} for e in self.events],
        }


def scenario_from_dict(d: dict) -> Scenario:
    """Build and validate a Scenario from its JSON document form."""
    if not isinstance(d, dict):
        raise ValidationError("scenario document must be a JSON object")
    if "base" not in d:
        raise ValidationError("scenario: missing field 'base'")
    events = []
    for i, e in enumerate(d.get("events", [])):
        try:
            kind = Kind(e["kind"])
            start, end = int(e["start"]), int(e["end"])
        except KeyError as exc:
            raise ValidationError(f"events[{i}]: missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"events[{i}]: {exc}") from exc
        params = e.get("params", {})
        if not isinstance(params, dict):
            raise ValidationError(f"events[{i}].params must be an object")
        events.append(TamperSpec(kind, start, end, params))
    try:
        seed = int(d.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"seed: {exc}") from exc
    base = d["base"]
    if not isinstance(base, (dict, str)):
        raise ValidationError("base must be an object or a path")
    sc = Scenario(base, events, seed, str(d.get("name", "scenario")))
    sc.validate()
    return sc


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc)


# -- procedural base -----------------------------------------------------------

def render_texture(width: int, height: int, seed: int, shapes: int = 40) -> np.ndarray:
    """Static scene: a shallow gradient with overlapping flat rectangles and discs."""
    rng = np.random.default_rng([seed, 0x7E47])
    yy, xx = np.mgrid[0:height, 0:width]
    img = (70 + (60 * xx) // max(width, 1) + (40 * yy) // max(height, 1)).astype(np.int32)
    scale = min(width, height)
    for _ in range(shapes):
        value = int(rng.integers(15, 236))
        cx = int(rng.integers(0, width))
        cy = int(rng.integers(0, height))
        size = int(rng.integers(max(2, scale // 16), max(3, scale // 3)))
        if rng.random() < 0.5:
            w = size
            h = int(rng.integers(max(2, scale // 16), max(3, scale // 3)))
            img[max(0, cy - h // 2):cy + h // 2, max(0, cx - w // 2):cx + w // 2] = value
        else:
            r2 = (size // 2) ** 2
            img[(xx - cx) ** 2 + (yy - cy) ** 2 <= r2] = value
    return img


def _bounce(p0: float, v: float, t: int, span: int) -> int:
    if span <= 0:
        return 0
    p = (p0 + v * t) % (2 * span)
    return int(p if p <= span else 2 * span - p)


def _objects(base: dict) -> list[dict]:
    if "objects" in base:
        return list(base["objects"])
    return [dict(DEFAULT_SQUARE)] * int(base.get("moving_squares", 1))


def _draw_objects(img: np.ndarray, objects: list[dict], t: int):
    h, w = img.shape
    for k, obj in enumerate(objects):
        if not obj.get("start", 0) <= t <= obj.get("end", 1 << 30):
            continue
        # "w"/"h" are fractions of the frame sides; "size" is a square side
        # as a fraction of the shorter one
        side = int(round(float(obj.get("size", 0.1)) * min(w, h)))
        ow = int(round(float(obj["w"]) * w)) if "w" in obj else side
        oh = int(round(float(obj["h"]) * h)) if "h" in obj else side
        ow, oh = min(max(ow, 1), w), min(max(oh, 1), h)
        t_rel = t - obj.get("start", 0)
        x0 = obj.get("x", (17 * k + 5) % max(1, w - ow))
        y0 = obj.get("y", (11 * k + 3) % max(1, h - oh))
        x = _bounce(x0, obj.get("vx", 0), t_rel, w - ow)
        y = _bounce(y0, obj.get("vy", 0), t_rel, h - oh)
        img[y:y + oh, x:x + ow] = int(obj.get("fill", 245))


def _glitch(img: np.ndarray, kind: str, rng) -> np.ndarray:
    h, w = img.shape
    if kind == "black":
        return np.zeros_like(img)
    if kind == "white":
        return np.full_like(img, 255)
    if kind == "noise":
        return rng.integers(0, 256, size=img.shape, dtype=np.uint8)
    if kind == "tear":
        out = img.copy()
        out[h // 2:, :] = np.roll(img[h // 2:, :], w // 3, axis=1)
        return out
    if kind == "blur":
        return apply_defocus(img, 3)
    raise ValidationError(f"unknown glitch type {kind!r}")


def render_base_frame(base: dict, seed: int, t: int, texture: np.ndarray | None = None) -> np.ndarray:
    """Frame ``t`` of a procedural base.

    Recognised keys: ``width``, ``height``, ``length``, ``noise`` (uniform
    integer amplitude), ``shapes``, ``moving_squares`` or ``objects``, and
    ``glitches`` (list of ``{"frame", "type"}``; glitches belong to the base,
    they are not tamper events).
    """
    w, h = int(base.get("width", 160)), int(base.get("height", 120))
    if texture is None:
        texture = render_texture(w, h, seed, int(base.get("shapes", 40)))
    img = texture.copy()
    rng = np.random.default_rng([seed, t, 0x5EED])
    amp = int(base.get("noise", DEFAULT_NOISE))
    if amp > 0:
        img = img + rng.integers(-amp, amp + 1, size=img.shape)
    # noise models lighting flicker on the static scene; objects are drawn flat on top
    _draw_objects(img, _objects(base), t)
    out = np.clip(img, 0, 255).astype(np.uint8)
    for g in base.get("glitches", []):
        if int(g["frame"]) == t:
            out = _glitch(out, g.get("type", "black"), rng)
    return out


def _apply_event(img: np.ndarray, ev: TamperSpec, t: int) -> np.ndarray:
    p = ev.params
    h, w = img.shape
    if ev.kind is Kind.MOTION:
        fill = p.get("fill", 0)
        fill = None if fill in (None, "wrap") else int(fill)
        return apply_shift(img, int(p.get("dx", 0)), int(p.get("dy", 0)), fill)
    if ev.kind is Kind.DEFOCUS:
        radius = int(p.get("radius", 5))
        ramp = int(p.get("ramp_frames", 0))
        if ramp > 0 and t - ev.start < ramp:
            radius = max(1, round(radius * (t - ev.start + 1) / ramp))
        return apply_defocus(img, radius)
    if ev.kind is Kind.OCCLUSION:
        rect = p.get("rect", [0, 0, w, h])
        return apply_occlusion(img, rect, int(p.get("fill", 0)))
    raise ValidationError(f"cannot inject {ev.kind}")


# camera moves first, then the lens blurs, then something covers the lens
_ORDER = {Kind.MOTION: 0, Kind.DEFOCUS: 1, Kind.OCCLUSION: 2}


def generate_scenario(scenario: Scenario, seed: int | None = None) -> tuple[FrameStream, GroundTruth]:
    """Render a scenario lazily.

    Frames outside every event interval equal the base frames bit for bit.
    """
    scenario.validate()
    seed = scenario.seed if seed is None else seed
    events = sorted(scenario.events, key=lambda e: _ORDER[e.kind])
    truth = scenario.ground_truth()
    base = scenario.base

    if isinstance(base, dict):
        w, h = int(base.get("width", 160)), int(base.get("height", 120))
        n = int(base.get("length", 300))
        texture = render_texture(w, h, seed, int(base.get("shapes", 40)))
        source = (render_base_frame(base, seed, t, texture) for t in range(n))
    else:
        stream = open_stream(base)
        w, h = stream.width, stream.height
        source = (f.luma for f in stream)

    def frames():
        for t, img in enumerate(source):
            for ev in events:
                if ev.start <= t <= ev.end:
                    img = _apply_event(img, ev, t)
            yield img

    return FrameStream(frames(), w, h, source=f"scenario:{scenario.name}"), truth


def write_scenario(scenario: Scenario, out_dir, seed: int | None = None) -> tuple[int, Path]:
    """Render to ``out_dir`` as PGM files plus ``truth.json``."""
    out_dir = Path(out_dir)
    stream, truth = generate_scenario(scenario, seed)
    n = write_pgm_dir(stream, out_dir / "frames")
    truth_path = out_dir / "truth.json"
    truth_path.write_text(json.dumps(truth.to_dict(), indent=2, sort_keys=True) + "\n")
    return n, truth_path


# -- standard corpora ----------------------------------------------------------

def _procedural(width, height, length, noise=DEFAULT_NOISE, **extra) -> dict:
    base = {"width": width, "height": height, "length": length, "noise": noise,
            "moving_squares": 1}
    base.update(extra)
    return base


def standard_corpus(seed: int = 0, width: int = 160, height: int = 120,
                    length: int = 300, start: int = 100, end: int = 199) -> list[Scenario]:
    """Ten clips: seven with one abrupt tamper each, three clean."""
    w, h = width, height
    specs = [
        ("occlusion_full_black", TamperSpec(Kind.OCCLUSION, start, end, {"rect": [0, 0, w, h], "fill": 0})),
        ("occlusion_full_bright", TamperSpec(Kind.OCCLUSION, start, end, {"rect": [0, 0, w, h], "fill": 240})),
        ("occlusion_quarter", TamperSpec(Kind.OCCLUSION, start, end,
                                         {"rect": [0, 0, w // 2, h // 2], "fill": 10})),
        ("defocus_r5", TamperSpec(Kind.DEFOCUS, start, end, {"radius": 5})),
        ("motion_shift_25", TamperSpec(Kind.MOTION, start, end, {"dx": w // 4, "dy": 0, "fill": "wrap"})),
        ("motion_shift_50", TamperSpec(Kind.MOTION, start, end, {"dx": w // 2, "dy": 0, "fill": "wrap"})),
        ("motion_shift_25_vertical", TamperSpec(Kind.MOTION, start, end,
                                                {"dx": 0, "dy": h // 4, "fill": "wrap"})),
    ]
    clips = []
    for i, (name, ev) in enumerate(specs):
        clips.append(Scenario(_procedural(w, h, length), [ev], seed + i, name))
    for i in range(3):
        clips.append(Scenario(_procedural(w, h, length), [], seed + 100 + i, f"clean_{i}"))
    return clips


GLITCH_TYPES = ("black", "white", "noise", "tear", "blur")


def glitch_corpus(seed: int = 0, width: int = 160, height: int = 120,
                  length: int = 300, frame: int = 150) -> list[Scenario]:
    """Five clean clips, each with one single-frame glitch (not a tamper)."""
    return [
        Scenario(_procedural(width, height, length, glitches=[{"frame": frame, "type": g}]),
                 [], seed + 200 + i, f"glitch_{g}")
        for i, g in enumerate(GLITCH_TYPES)
    ]


def large_object_clip(coverage: float, seed: int = 0, width: int = 160, height: int = 120,
                      length: int = 300, start: int = 100, end: int = 199) -> Scenario:
    """Clean clip in which a dark object abruptly fills ``coverage`` of the view.

    The object spans the full height and ``coverage`` of the width and drifts
    sideways while present.
    """
    obj = {"w": float(coverage), "h": 1.0, "x": 0, "y": 0, "vx": 1, "vy": 0,
           "fill": 12, "start": start, "end": end}
    base = _procedural(width, height, length,
                       objects=[dict(DEFAULT_SQUARE), obj])
    return Scenario(base, [], seed, f"large_object_{int(round(coverage * 100))}")
