"""Scoring of detector event streams against ground truth.

Rates follow the usual detection-table convention:

    TDR = TP / (TP + FN)        FDR = FP / (TP + FP)

with FDR = 0 when nothing was emitted.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .detectors import DetectorConfig, TamperEvent, make_detector
from .errors import ConfigError, DomainError
from .frame_io import Frame
from .kinds import Kind
from .synth import GroundTruth, Interval, Scenario, generate_scenario

__all__ = [
    "DEFAULT_WINDOW",
    "MatchResult",
    "RateReport",
    "Clip",
    "match_events",
    "compute_rates",
    "render_corpus",
    "evaluate_clip",
    "evaluate_corpus",
    "sweep",
    "report_rows",
    "write_report",
    "CSV_COLUMNS",
]

DEFAULT_WINDOW = 50
CSV_COLUMNS = ["clip", "detector", "kind", "TP", "FP", "FN", "TDR", "FDR", "mean_latency"]


@dataclass
class MatchResult:
    matches: list[tuple[TamperEvent, Interval]] = field(default_factory=list)
    unmatched_events: list[TamperEvent] = field(default_factory=list)
    unmatched_intervals: list[Interval] = field(default_factory=list)

    @property
    def true_positives(self) -> int:
        return len(self.matches)

    @property
    def false_positives(self) -> int:
        return len(self.unmatched_events)

    @property
    def false_negatives(self) -> int:
        return len(self.unmatched_intervals)

    @property
    def latencies(self) -> list[int]:
        return [ev.frame_index - iv.start for ev, iv in self.matches]

    def merged(self, other: "MatchResult") -> "MatchResult":
        return MatchResult(self.matches + other.matches,
                           self.unmatched_events + other.unmatched_events,
                           self.unmatched_intervals + other.unmatched_intervals)


def _kinds_compatible(event_kind: Kind, truth_kind: Kind) -> bool:
    return event_kind is Kind.GENERIC or event_kind is truth_kind


def match_events(events: Sequence[TamperEvent], truth: GroundTruth | Sequence[Interval],
                 window: int = DEFAULT_WINDOW) -> MatchResult:
    """Greedy chronological matching.

    Each event takes the earliest-starting unmatched interval of a compatible
    kind whose ``[start, end + window]`` contains it. Generic events are
    compatible with every kind.
    """
    intervals = list(truth.intervals if isinstance(truth, GroundTruth) else truth)
    frames = [e.frame_index for e in events]
    if any(b < a for a, b in zip(frames, frames[1:])):
        raise DomainError("events must be sorted by frame index")
    order = sorted(range(len(intervals)), key=lambda i: (intervals[i].start, i))
    taken = [False] * len(intervals)
    result = MatchResult()
    for ev in events:
        for i in order:
            iv = intervals[i]
            if taken[i] or not _kinds_compatible(ev.kind, iv.kind):
                continue
            if iv.start <= ev.frame_index <= iv.end + window:
                taken[i] = True
                result.matches.append((ev, iv))
                break
        else:
            result.unmatched_events.append(ev)
    result.unmatched_intervals = [intervals[i] for i in range(len(intervals)) if not taken[i]]
    return result


def _rates(tp: int, fp: int, fn: int) -> tuple[float, float]:
    tdr = tp / (tp + fn) if tp + fn else 0.0
    fdr = fp / (tp + fp) if tp + fp else 0.0
    return tdr, fdr


@dataclass
class RateReport:
    true_positives: int
    false_positives: int
    false_negatives: int
    true_detection_rate: float
    false_detection_rate: float
    mean_latency: float | None
    per_kind: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "TP": self.true_positives,
            "FP": self.false_positives,
            "FN": self.false_negatives,
            "TDR": self.true_detection_rate,
            "FDR": self.false_detection_rate,
            "mean_latency": self.mean_latency,
            "per_kind": self.per_kind,
            "config": self.config,
        }


def compute_rates(match: MatchResult, config: dict | None = None, label: str = "") -> RateReport:
    tp, fp, fn = match.true_positives, match.false_positives, match.false_negatives
    tdr, fdr = _rates(tp, fp, fn)
    lat = match.latencies
    per_kind = {}
    for kind in Kind:
        ktp = sum(1 for _, iv in match.matches if iv.kind is kind)
        kfn = sum(1 for iv in match.unmatched_intervals if iv.kind is kind)
        kfp = sum(1 for ev in match.unmatched_events if ev.kind is kind)
        if ktp or kfn or kfp:
            ktdr, kfdr = _rates(ktp, kfp, kfn)
            per_kind[kind.value] = {"TP": ktp, "FP": kfp, "FN": kfn, "TDR": ktdr, "FDR": kfdr}
    return RateReport(tp, fp, fn, tdr, fdr, sum(lat) / len(lat) if lat else None,
                      per_kind, dict(config or {}), label)


# -- corpus evaluation -----------------------------------------------------------

@dataclass
class Clip:
    name: str
    frames: list[Frame]
    truth: GroundTruth


def render_corpus(scenarios: Iterable[Scenario]) -> list[Clip]:
    clips = []
    for sc in scenarios:
        stream, truth = generate_scenario(sc)
        clips.append(Clip(sc.name, list(stream), truth))
    return clips


def _as_clips(corpus) -> list[Clip]:
    corpus = list(corpus)
    if corpus and isinstance(corpus[0], Scenario):
        return render_corpus(corpus)
    return corpus


def evaluate_clip(detector_id: str, clip: Clip, config: DetectorConfig | None = None,
                  window: int = DEFAULT_WINDOW) -> tuple[list[TamperEvent], MatchResult]:
    events = make_detector(detector_id, config).run(clip.frames)
    return events, match_events(events, clip.truth, window)


def evaluate_corpus(detector_id: str, corpus, config: DetectorConfig | None = None,
                    window: int = DEFAULT_WINDOW) -> tuple[RateReport, dict[str, MatchResult]]:
    """Run one detector over every clip; clips are aggregated in name order."""
    config = config or DetectorConfig()
    per_clip = {}
    total = MatchResult()
    for clip in sorted(_as_clips(corpus), key=lambda c: c.name):
        _, m = evaluate_clip(detector_id, clip, config, window)
        per_clip[clip.name] = m
        total = total.merged(m)
    return compute_rates(total, config.to_dict(), detector_id), per_clip


def sweep(detector_id: str, param_name: str, values: Iterable, corpus,
          config: DetectorConfig | None = None, window: int = DEFAULT_WINDOW) -> list[RateReport]:
    """One corpus evaluation per value of ``param_name``, in the given order."""
    config = config or DetectorConfig()
    if param_name not in DetectorConfig.field_names():
        raise ConfigError(f"unknown parameter {param_name!r}")
    values = list(values)
    if not values:
        return []
    clips = _as_clips(corpus)
    reports = []
    for v in values:
        cfg = config.with_overrides(**{param_name: v})
        report, _ = evaluate_corpus(detector_id, clips, cfg, window)
        report.label = f"{detector_id}:{param_name}={v}"
        reports.append(report)
    return reports


# -- report files --------------------------------------------------------------

def report_rows(clip: str, detector: str, match: MatchResult) -> list[dict]:
    """The CSV row for one clip and detector.

    ``kind`` names the truth kinds present in the clip (``+``-joined), or
    ``none`` for a clean clip.
    """
    rep = compute_rates(match)
    kinds = {iv.kind.value for _, iv in match.matches} | {iv.kind.value for iv in match.unmatched_intervals}
    lat = rep.mean_latency
    return [{"clip": clip, "detector": detector, "kind": "+".join(sorted(kinds)) or "none",
             "TP": rep.true_positives, "FP": rep.false_positives, "FN": rep.false_negatives,
             "TDR": rep.true_detection_rate, "FDR": rep.false_detection_rate,
             "mean_latency": "" if lat is None else lat}]


def write_report(rows: list[dict], summary: dict, csv_path, json_path) -> None:
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    Path(json_path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
