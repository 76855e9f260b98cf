import csv
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from camtamper.cli import main
from camtamper.detectors import DetectorConfig, run_detectors
from camtamper.evaluation import evaluate_clip
from camtamper.frame_io import open_stream, write_y4m
from camtamper.synth import Scenario, TamperSpec, generate_scenario, load_scenario, standard_corpus
from camtamper.kinds import Kind

SCENARIOS = Path(__file__).resolve().parents[1] / "demos" / "scenarios"
ALL = "alg1,alg2,alg3,alg4,alg5,combined,motion"


def small_scenario(tmp_path, events=(), name="s", length=60):
    doc = {"name": name, "seed": 3,
           "base": {"width": 64, "height": 48, "length": length, "noise": 2, "moving_squares": 1},
           "events": list(events)}
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(doc))
    return p


def read_events(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines()]


def test_detect_clean_all_detectors_empty(tmp_path, capsys):
    rc = main(["detect", "--input", str(SCENARIOS / "clean_0.json"), "--detectors", ALL,
               "--out", str(tmp_path / "o")])
    assert rc == 0
    assert (tmp_path / "o" / "events.jsonl").read_text() == ""
    assert "events: 0" in (tmp_path / "o" / "summary.txt").read_text()


def test_detect_occlusion_one_line(tmp_path):
    rc = main(["detect", "--input", str(SCENARIOS / "occlusion_full_black.json"),
               "--detectors", "combined", "--out", str(tmp_path / "o")])
    assert rc == 0
    events = read_events(tmp_path / "o" / "events.jsonl")
    assert len(events) == 1
    assert set(events[0]) == {"detector", "kind", "frame", "score"}
    assert events[0]["kind"] == "occlusion" and 100 <= events[0]["frame"] <= 110


def test_detect_missing_input_leaves_nothing(tmp_path):
    out = tmp_path / "o"
    assert main(["detect", "--input", str(tmp_path / "nope"), "--out", str(out)]) == 2
    assert not out.exists()


def test_detect_corrupt_input_is_io_error(tmp_path):
    bad = tmp_path / "bad.y4m"
    bad.write_bytes(b"YUV4MPEG2 W4 H4 Cmono\nFRAME\n" + bytes(16) + b"FRAME\n" + bytes(3))
    out = tmp_path / "o"
    assert main(["detect", "--input", str(bad), "--detectors", "alg1", "--out", str(out)]) == 2
    assert not (out / "events.jsonl").exists()


@pytest.mark.parametrize("extra", [["--set", "theta_B=-1"], ["--set", "nope=1"], ["--set", "tau"],
                                   ["--detectors", "alg7"], ["--detectors", ","]])
def test_detect_bad_config(tmp_path, extra):
    args = ["detect", "--input", str(SCENARIOS / "clean_0.json"), "--out", str(tmp_path / "o")]
    assert main(args + extra) == 3
    assert not (tmp_path / "o").exists()


def test_detect_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha_entropy": 0.0}))
    p = small_scenario(tmp_path, [{"kind": "occlusion", "start": 20, "end": 40,
                                   "params": {"fill": 0}}])
    assert main(["detect", "--input", str(p), "--detectors", "alg1", "--config", str(cfg),
                 "--out", str(tmp_path / "o")]) == 0
    assert read_events(tmp_path / "o" / "events.jsonl") == []
    cfg.write_text("[1, 2]")
    assert main(["detect", "--input", str(p), "--config", str(cfg), "--out", str(tmp_path / "x")]) == 3
    cfg.write_text("{bad")
    assert main(["detect", "--input", str(p), "--config", str(cfg), "--out", str(tmp_path / "x")]) == 3


def test_detect_equals_library(tmp_path):
    p = small_scenario(tmp_path, [{"kind": "motion", "start": 20, "end": 45,
                                   "params": {"dx": 16, "fill": "wrap"}}])
    assert main(["detect", "--input", str(p), "--detectors", ALL, "--set", "persistence=3",
                 "--out", str(tmp_path / "o")]) == 0
    stream, _ = generate_scenario(load_scenario(p))
    expected = run_detectors(stream, ALL.split(","), DetectorConfig(persistence=3))
    got = read_events(tmp_path / "o" / "events.jsonl")
    assert got == [json.loads(json.dumps(e.to_dict())) for e in expected]


def test_detect_y4m_and_pgm_dir_agree(tmp_path):
    p = small_scenario(tmp_path, [{"kind": "occlusion", "start": 20, "end": 40, "params": {}}])
    assert main(["synth", str(p), "--out", str(tmp_path / "syn")]) == 0
    write_y4m(list(open_stream(tmp_path / "syn" / "frames")), tmp_path / "v.y4m")
    main(["detect", "--input", str(tmp_path / "syn" / "frames"), "--detectors", ALL,
          "--out", str(tmp_path / "a")])
    main(["detect", "--input", str(tmp_path / "v.y4m"), "--detectors", ALL,
          "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "events.jsonl").read_bytes() == (tmp_path / "b" / "events.jsonl").read_bytes()


def test_synth_deterministic_and_padded(tmp_path):
    src = SCENARIOS / "clean_0.json"
    assert main(["synth", str(src), "--out", str(tmp_path / "a")]) == 0
    assert main(["synth", str(src), "--out", str(tmp_path / "b")]) == 0
    names = sorted(p.name for p in (tmp_path / "a" / "frames").iterdir())
    assert len(names) == 300
    assert names[0] == "frame_000000.pgm" and names[-1] == "frame_000299.pgm"
    for n in names:
        assert (tmp_path / "a" / "frames" / n).read_bytes() == (tmp_path / "b" / "frames" / n).read_bytes()
    assert (tmp_path / "a" / "truth.json").read_bytes() == (tmp_path / "b" / "truth.json").read_bytes()


def test_synth_seed_flag_changes_output(tmp_path):
    p = small_scenario(tmp_path, length=3)
    main(["synth", str(p), "--out", str(tmp_path / "a")])
    main(["synth", str(p), "--out", str(tmp_path / "b"), "--seed", "99"])
    f = "frames/frame_000000.pgm"
    assert (tmp_path / "a" / f).read_bytes() != (tmp_path / "b" / f).read_bytes()


def test_synth_overlap_rejected(tmp_path, capsys):
    p = small_scenario(tmp_path, [{"kind": "motion", "start": 5, "end": 10, "params": {}},
                                  {"kind": "motion", "start": 8, "end": 12, "params": {}}])
    assert main(["synth", str(p), "--out", str(tmp_path / "o")]) == 3
    assert "overlapping motion" in capsys.readouterr().err


def test_synth_json_error_has_line(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "base": {\n    "width": 10,\n  }\n}')
    assert main(["synth", str(p), "--out", str(tmp_path / "o")]) == 3
    assert "line 4" in capsys.readouterr().err


def test_synth_missing_field_diagnostic(tmp_path, capsys):
    p = small_scenario(tmp_path, [{"kind": "defocus", "end": 10}])
    assert main(["synth", str(p), "--out", str(tmp_path / "o")]) == 3
    err = capsys.readouterr().err
    assert "events[0]" in err and "'start'" in err


def _write(tmp_path, events, truth):
    ev = tmp_path / "e.jsonl"
    ev.write_text("".join(json.dumps(e) + "\n" for e in events))
    tr = tmp_path / "t.json"
    tr.write_text(json.dumps(truth))
    return ev, tr


def test_eval_exact_hit(tmp_path):
    ev, tr = _write(tmp_path, [{"detector": "d", "kind": "motion", "frame": 12, "score": 1.0}],
                    {"name": "c", "length": 50, "events": [{"kind": "motion", "start": 10, "end": 20}]})
    assert main(["eval", "--events", str(ev), "--truth", str(tr), "--report", str(tmp_path / "r.csv")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "r.csv")))
    assert rows[0]["TDR"] == "1.0" and rows[0]["FDR"] == "0.0"
    summary = json.loads((tmp_path / "r.json").read_text())
    assert summary["detectors"]["d"]["TP"] == 1


def test_eval_empty_events(tmp_path):
    ev, tr = _write(tmp_path, [], {"events": [{"kind": "defocus", "start": 1, "end": 2}]})
    assert main(["eval", "--events", str(ev), "--truth", str(tr), "--report", str(tmp_path / "r.csv"),
                 "--detectors", "alg3"]) == 0
    rows = list(csv.DictReader(open(tmp_path / "r.csv")))
    assert rows[0]["detector"] == "alg3" and rows[0]["TDR"] == "0.0"


@pytest.mark.parametrize("events,truth", [
    ([{"detector": "d", "kind": "motion"}], {"events": []}),
    ([{"detector": "d", "kind": "sideways", "frame": 1, "score": 0}], {"events": []}),
    ([], {"intervals": []}),
    ([], {"events": [{"kind": "motion", "start": "x", "end": 2}]}),
])
def test_eval_schema_mismatch(tmp_path, events, truth):
    ev, tr = _write(tmp_path, events, truth)
    assert main(["eval", "--events", str(ev), "--truth", str(tr), "--report", str(tmp_path / "r.csv")]) == 3


def test_eval_missing_file(tmp_path):
    assert main(["eval", "--events", str(tmp_path / "x"), "--truth", str(tmp_path / "y"),
                 "--report", str(tmp_path / "r.csv")]) == 2


def test_pipeline_matches_library_evaluation(tmp_path):
    """synth -> detect -> eval through the CLI reproduces in-process rates exactly."""
    corpus = standard_corpus(width=64, height=48, length=120, start=40, end=79)
    for sc in corpus:
        doc = tmp_path / f"{sc.name}.json"
        doc.write_text(json.dumps(sc.to_dict()))
        d = tmp_path / sc.name
        assert main(["synth", str(doc), "--out", str(d)]) == 0
        assert main(["detect", "--input", str(d / "frames"), "--detectors", "combined,alg5",
                     "--out", str(d / "det")]) == 0
        assert main(["eval", "--events", str(d / "det" / "events.jsonl"), "--truth", str(d / "truth.json"),
                     "--report", str(d / "report.csv"), "--detectors", "combined,alg5"]) == 0
        rows = {r["detector"]: r for r in csv.DictReader(open(d / "report.csv"))}
        from camtamper.evaluation import Clip
        stream, truth = generate_scenario(sc)
        clip = Clip(sc.name, list(stream), truth)
        for det in ("combined", "alg5"):
            _, m = evaluate_clip(det, clip)
            assert int(rows[det]["TP"]) == m.true_positives
            assert int(rows[det]["FP"]) == m.false_positives
            assert int(rows[det]["FN"]) == m.false_negatives


def test_selftest_pristine(capsys):
    assert main(["selftest"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("check,status")
    assert len(lines) > 5 and all(",pass," in ln for ln in lines[1:])


def test_selftest_perturbed_dct(capsys):
    assert main(["selftest", "--perturb-dct"]) == 1
    out = capsys.readouterr().out
    assert "dct2_parseval,FAIL" in out and "fft2_vs_naive_dft,pass" in out


def test_console_script_installed(tmp_path):
    exe = shutil.which("camtamper")
    cmd = [exe] if exe else [sys.executable, "-m", "camtamper.cli"]
    r = subprocess.run(cmd + ["detect", "--input", str(tmp_path / "none"), "--out", str(tmp_path / "o")],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "input not found" in r.stderr
