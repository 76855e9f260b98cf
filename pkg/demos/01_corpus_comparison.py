"""
Comparing the detectors on the standard synthetic corpus
========================================================

Ten clips: seven carry one abrupt tamper each (frames 100-199), three are
clean. Every detector runs over every clip and is scored with the
event-level protocol: an event matches a tamper interval if it falls inside
it or within 50 frames after its end.
"""

from camtamper import DETECTORS, evaluate_corpus, standard_corpus
from camtamper.evaluation import render_corpus

# render once, reuse for every detector
clips = render_corpus(standard_corpus(seed=0))
print(f"{len(clips)} clips, {len(clips[0].frames)} frames each")

print(f"{'detector':<10} {'TP':>3} {'FP':>4} {'FN':>3} {'TDR':>6} {'FDR':>6}  latency")
for det in DETECTORS:
    report, per_clip = evaluate_corpus(det, clips)
    lat = "-" if report.mean_latency is None else f"{report.mean_latency:.1f}"
    print(f"{det:<10} {report.true_positives:>3} {report.false_positives:>4} "
          f"{report.false_negatives:>3} {report.true_detection_rate:>6.3f} "
          f"{report.false_detection_rate:>6.3f}  {lat}")

# which clips does the combined detector hit, and how fast?
_, per_clip = evaluate_corpus("combined", clips)
for name, m in per_clip.items():
    hits = [(iv.kind.value, e.frame_index - iv.start) for e, iv in m.matches]
    print(f"  {name:<26} hits={hits} false={m.false_positives}")
