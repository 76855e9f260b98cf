"""Command-line entry point: ``camtamper {detect,synth,eval,selftest}``.

Exit codes: 0 ok, 1 selftest failure, 2 I/O error, 3 config/validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .detectors import DETECTORS, DetectorConfig, TamperEvent, run_detectors
from .errors import ConfigError, FormatError, TruncatedError, UnsupportedError, ValidationError
from .evaluation import DEFAULT_WINDOW, compute_rates, match_events, report_rows, write_report
from .frame_io import open_stream
from .synth import GroundTruth, generate_scenario, load_scenario, write_scenario

log = logging.getLogger("camtamper")

EXIT_OK, EXIT_SELFTEST, EXIT_IO, EXIT_CONFIG = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def build_config(config_path: str | None, sets: list[str] | None) -> DetectorConfig:
    overrides = {}
    if config_path:
        try:
            doc = json.loads(Path(config_path).read_text())
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_CONFIG, f"{config_path}: line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(doc, dict):
            raise CliError(EXIT_CONFIG, f"{config_path}: expected a JSON object")
        overrides.update(doc)
    for item in sets or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise CliError(EXIT_CONFIG, f"--set expects name=value, got {item!r}")
        overrides[name.strip()] = value.strip()
    try:
        return DetectorConfig().with_overrides(**overrides)
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from exc


def parse_detectors(spec: str) -> list[str]:
    ids = [d.strip() for d in spec.split(",") if d.strip()]
    if not ids:
        raise CliError(EXIT_CONFIG, "no detector selected")
    unknown = [d for d in ids if d not in DETECTORS]
    if unknown:
        raise CliError(EXIT_CONFIG, f"unknown detector(s): {', '.join(unknown)}")
    return ids


def open_input(path: str, seed: int | None):
    """Frame source from a PGM directory, Y4M/PGM file or scenario JSON."""
    p = Path(path)
    if not p.exists():
        raise CliError(EXIT_IO, f"input not found: {path}")
    if p.suffix == ".json":
        try:
            stream, _ = generate_scenario(load_scenario(p), seed)
        except ValidationError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc
        return stream
    try:
        return open_stream(p)
    except (FormatError, UnsupportedError, OSError) as exc:
        raise CliError(EXIT_IO, str(exc)) from exc


def format_events(events: list[TamperEvent]) -> str:
    return "".join(json.dumps(e.to_dict()) + "\n" for e in events)


def write_outputs(out: Path, files: dict[str, str]) -> None:
    """Write every file under a temporary name first, then rename into place."""
    out.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            tmp = out / f".{name}.tmp"
            tmp.write_text(text)
            staged.append((tmp, out / name))
    except OSError:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)


def cmd_detect(args) -> int:
    detectors = parse_detectors(args.detectors)
    config = build_config(args.config, args.set)
    stream = open_input(args.input, args.seed)
    try:
        events = run_detectors(stream, detectors, config)
    except (FormatError, TruncatedError, OSError) as exc:
        raise CliError(EXIT_IO, f"reading {args.input}: {exc}") from exc
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from exc

    # base name only, so outputs do not depend on where the run happened
    lines = [f"input: {Path(args.input).name}", f"detectors: {','.join(detectors)}",
             f"events: {len(events)}"]
    for d in detectors:
        mine = [e for e in events if e.detector_id == d]
        kinds = {}
        for e in mine:
            kinds[e.kind.value] = kinds.get(e.kind.value, 0) + 1
        detail = ", ".join(f"{k}={n}" for k, n in sorted(kinds.items())) or "none"
        lines.append(f"  {d}: {len(mine)} ({detail})")

    try:
        write_outputs(Path(args.out), {"events.jsonl": format_events(events),
                                       "summary.txt": "\n".join(lines) + "\n"})
    except OSError as exc:
        raise CliError(EXIT_IO, f"writing output: {exc}") from exc
    print("\n".join(lines))
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read scenario: {exc}") from exc
    except ValidationError as exc:
        raise CliError(EXIT_CONFIG, f"invalid scenario: {exc}") from exc
    try:
        n, truth_path = write_scenario(scenario, args.out, args.seed)
    except ValidationError as exc:
        raise CliError(EXIT_CONFIG, f"invalid scenario: {exc}") from exc
    except OSError as exc:
        raise CliError(EXIT_IO, f"writing output: {exc}") from exc
    print(f"wrote {n} frames to {Path(args.out) / 'frames'} and {truth_path}")
    return EXIT_OK


def read_events(path) -> list[TamperEvent]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read events: {exc}") from exc
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            events.append(TamperEvent.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CliError(EXIT_CONFIG, f"{path}:{lineno}: bad event record ({exc})") from exc
    return events


def read_truth(path) -> GroundTruth:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read truth: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_CONFIG, f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        return GroundTruth.from_dict(doc)
    except ValidationError as exc:
        raise CliError(EXIT_CONFIG, f"{path}: {exc}") from exc


def evaluate_files(events: list[TamperEvent], truth: GroundTruth, clip: str,
                   detectors: list[str] | None, window: int):
    if detectors is None:
        detectors = list(dict.fromkeys(e.detector_id for e in events)) or ["none"]
    rows, summary = [], {"clip": clip, "window": window, "detectors": {}}
    for d in detectors:
        mine = sorted((e for e in events if e.detector_id == d), key=lambda e: e.frame_index)
        m = match_events(mine, truth, window)
        rows.extend(report_rows(clip, d, m))
        summary["detectors"][d] = compute_rates(m, label=d).to_dict()
    return rows, summary


def cmd_eval(args) -> int:
    events = read_events(args.events)
    truth = read_truth(args.truth)
    clip = truth.name or Path(args.truth).parent.name
    detectors = parse_detectors(args.detectors) if args.detectors else None
    rows, summary = evaluate_files(events, truth, clip, detectors, args.window)
    report = Path(args.report)
    try:
        report.parent.mkdir(parents=True, exist_ok=True)
        write_report(rows, summary, report, report.with_suffix(".json"))
    except OSError as exc:
        raise CliError(EXIT_IO, f"writing report: {exc}") from exc
    for d, rep in summary["detectors"].items():
        print(f"{d}: TP={rep['TP']} FP={rep['FP']} FN={rep['FN']} "
              f"TDR={rep['TDR']:.3f} FDR={rep['FDR']:.3f}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(bench=args.bench, perturb_dct=args.perturb_dct)
    print("check,status,detail")
    for name, ok, detail in results:
        print(f"{name},{'pass' if ok else 'FAIL'},{detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camtamper", description="Camera-tampering detection for grayscale video.",
        epilog="exit codes: 0 ok, 1 selftest failure, 2 I/O error, 3 config error")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run detectors over a frame source")
    p.add_argument("--input", required=True, help="PGM directory, Y4M file or scenario JSON")
    p.add_argument("--detectors", default="combined",
                   help=f"comma-separated subset of {','.join(DETECTORS)}")
    p.add_argument("--config", help="JSON object of detector config fields")
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="override one config field (repeatable)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="seed override for scenario input")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("synth", help="render a scenario to PGM frames and truth JSON")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="score events against ground truth")
    p.add_argument("--events", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--report", required=True, help="CSV path; JSON summary goes next to it")
    p.add_argument("--detectors", help="detectors to report (default: those in the events file)")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("selftest", help="run embedded oracle checks")
    p.add_argument("--bench", action="store_true", help="also time the combined detector")
    p.add_argument("--perturb-dct", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"camtamper: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
