"""
Looking inside the combined detector
====================================

``CombinedDetector.last_cues`` keeps what was measured on the latest frame:
whether the gate opened, which single cues fired, the DCT high-frequency
count and the tentative class. Stepping through a clip with three tampers
in a row shows how the class decision follows the cues.
"""

from pathlib import Path

from camtamper import CombinedDetector
from camtamper.synth import generate_scenario, load_scenario

scenario = load_scenario(Path(__file__).parent / "scenarios" / "mixed.json")
stream, truth = generate_scenario(scenario)
print("truth:", [(iv.kind.value, iv.start, iv.end) for iv in truth.intervals])

det = CombinedDetector()
for frame in stream:
    event = det.step(frame)
    c = det.last_cues
    # print a line around every tamper onset and recovery, plus every event
    near = any(abs(frame.index - b) <= 6 for iv in truth.intervals for b in (iv.start, iv.end + 1))
    if event or (near and frame.index % 2 == 0):
        cand = c.candidate.value if c and c.candidate else "-"
        print(f"frame {frame.index:3d} gate={c.gate!s:<5} edge={c.edge_fires!s:<5} "
              f"hist={c.huang.hist!s:<5} dct={c.hf_count:5d} defocus={c.defocus!s:<5} "
              f"class={cand:<9}" + (f" EVENT {event.kind.value}" if event else ""))
