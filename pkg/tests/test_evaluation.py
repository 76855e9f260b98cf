import csv
import json

import numpy as np
import pytest

import oracles
from camtamper.detectors import DetectorConfig, TamperEvent
from camtamper.errors import ConfigError, DomainError
from camtamper.evaluation import (
    CSV_COLUMNS, compute_rates, evaluate_corpus, match_events, report_rows, sweep, write_report,
)
from camtamper.kinds import Kind
from camtamper.synth import GroundTruth, Interval, standard_corpus

K = list(Kind)


def ev(kind, frame, det="x"):
    return TamperEvent(kind, frame, 1.0, det)


def test_empty():
    m = match_events([], GroundTruth(()))
    assert (m.true_positives, m.false_positives, m.false_negatives) == (0, 0, 0)


def test_event_inside_interval():
    m = match_events([ev(Kind.OCCLUSION, 12)], [Interval(Kind.OCCLUSION, 10, 20)])
    assert (m.true_positives, m.false_positives, m.false_negatives) == (1, 0, 0)
    assert m.latencies == [2]


def test_window_boundary():
    iv = [Interval(Kind.DEFOCUS, 10, 20)]
    assert match_events([ev(Kind.DEFOCUS, 70)], iv, window=50).true_positives == 1
    assert match_events([ev(Kind.DEFOCUS, 71)], iv, window=50).true_positives == 0
    assert match_events([ev(Kind.DEFOCUS, 9)], iv).true_positives == 0


def test_kind_rules():
    iv = [Interval(Kind.MOTION, 0, 10)]
    assert match_events([ev(Kind.OCCLUSION, 5)], iv).true_positives == 0
    assert match_events([ev(Kind.GENERIC, 5)], iv).true_positives == 1


def test_one_event_per_interval():
    m = match_events([ev(Kind.MOTION, 3), ev(Kind.MOTION, 4)], [Interval(Kind.MOTION, 0, 10)])
    assert (m.true_positives, m.false_positives) == (1, 1)


def test_unsorted_events_rejected():
    with pytest.raises(DomainError):
        match_events([ev(Kind.MOTION, 5), ev(Kind.MOTION, 4)], [])


def test_greedy_equals_optimal_on_disjoint_layouts(rng):
    def compatible(a, b):
        return a is Kind.GENERIC or a is b

    for _ in range(200):
        n_iv = int(rng.integers(0, 4))
        intervals, t = [], 0
        for _ in range(n_iv):
            start = t + int(rng.integers(0, 20))
            end = start + int(rng.integers(0, 15))
            intervals.append((K[int(rng.integers(0, 3))], start, end))
            t = end + 6  # gap beyond the window: windows stay disjoint
        frames = sorted(int(x) for x in rng.integers(0, t + 10, int(rng.integers(0, 7))))
        events = [(K[int(rng.integers(0, 4))], f) for f in frames]
        m = match_events([ev(k, f) for k, f in events],
                         [Interval(k, s, e) for k, s, e in intervals], window=5)
        assert m.true_positives == oracles.optimal_match_count(events, intervals, 5, compatible)
        assert m.true_positives + m.false_negatives == len(intervals)
        assert m.true_positives + m.false_positives == len(events)


def test_rates_arithmetic():
    from camtamper.evaluation import MatchResult
    iv = Interval(Kind.MOTION, 0, 1)
    m = MatchResult([(ev(Kind.MOTION, 0), iv)] * 19, [ev(Kind.MOTION, 99)], [])
    r = compute_rates(m)
    assert r.false_detection_rate == 0.05 and r.true_detection_rate == 1.0
    r = compute_rates(MatchResult([], [], [iv] * 5))
    assert r.true_detection_rate == 0.0 and r.false_detection_rate == 0.0


def test_table_row_mapping():
    # the 4.8% / 95.2% row corresponds to e.g. TP=20, FN=1, FP=1
    from camtamper.evaluation import MatchResult
    iv = Interval(Kind.MOTION, 0, 1)
    r = compute_rates(MatchResult([(ev(Kind.MOTION, 0), iv)] * 20, [ev(Kind.MOTION, 9)], [iv]))
    assert round(100 * r.false_detection_rate, 1) == 4.8
    assert round(100 * r.true_detection_rate, 1) == 95.2


def test_per_kind_breakdown():
    m = match_events([ev(Kind.MOTION, 5), ev(Kind.DEFOCUS, 40)],
                     [Interval(Kind.MOTION, 0, 10), Interval(Kind.OCCLUSION, 100, 110)])
    r = compute_rates(m)
    assert r.per_kind["motion"]["TP"] == 1
    assert r.per_kind["occlusion"]["FN"] == 1
    assert r.per_kind["defocus"]["FP"] == 1


def test_report_files(tmp_path):
    m = match_events([ev(Kind.MOTION, 5)], [Interval(Kind.MOTION, 0, 10)])
    rows = report_rows("clipA", "alg2", m)
    assert len(rows) == 1 and rows[0]["kind"] == "motion" and rows[0]["TDR"] == 1.0
    write_report(rows, {"k": 1}, tmp_path / "r.csv", tmp_path / "r.json")
    with open(tmp_path / "r.csv") as fh:
        reader = csv.reader(fh)
        assert next(reader) == CSV_COLUMNS
        assert next(reader)[:3] == ["clipA", "alg2", "motion"]
    assert json.loads((tmp_path / "r.json").read_text()) == {"k": 1}


def test_clean_clip_row_kind_none():
    assert report_rows("c", "alg1", match_events([], []))[0]["kind"] == "none"


SMALL = dict(width=96, height=72, length=130, start=50, end=89)


@pytest.fixture(scope="module")
def small_corpus():
    from camtamper.evaluation import render_corpus
    return render_corpus(standard_corpus(**SMALL))


def test_sweep_single_value_equals_direct(small_corpus):
    direct, _ = evaluate_corpus("alg1", small_corpus, DetectorConfig(alpha_entropy=0.4))
    [swept] = sweep("alg1", "alpha_entropy", [0.4], small_corpus)
    assert swept.to_dict()["TP"] == direct.true_positives
    assert swept.false_positives == direct.false_positives
    assert swept.config == direct.config


def test_sweep_errors_and_empty(small_corpus):
    with pytest.raises(ConfigError):
        sweep("alg1", "nope", [1], small_corpus)
    assert sweep("alg1", "alpha_entropy", [], small_corpus) == []


def test_alpha_entropy_sweep_monotone(small_corpus):
    values = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    tdr = [r.true_detection_rate for r in sweep("alg1", "alpha_entropy", values, small_corpus)]
    assert tdr == sorted(tdr)
    assert tdr[-1] > 0


def test_persistence_debouncing_monotone(standard_clips):
    reps = sweep("combined", "persistence", [1, 3, 5, 8, 12], standard_clips)
    tdr = [r.true_detection_rate for r in reps]
    fp = [r.false_positives for r in reps]
    assert tdr == sorted(tdr)
    assert fp == sorted(fp, reverse=True)


def test_corpus_aggregation_order_independent(small_corpus):
    a, per_a = evaluate_corpus("alg5", small_corpus)
    b, per_b = evaluate_corpus("alg5", list(reversed(small_corpus)))
    assert a.to_dict() == b.to_dict()
    assert list(per_a) == sorted(per_a) == list(per_b)
