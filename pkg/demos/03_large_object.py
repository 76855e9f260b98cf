"""
When a passer-by looks like an occlusion
========================================

The three-phase detector (alg2) decides occlusion from the share of pixels
that changed against the background model. A large object walking through
the view changes many pixels too, so past the ``theta_B`` share it raises
an occlusion alarm even though the camera was never touched.
"""

from camtamper import Kind, run_detector
from camtamper.synth import generate_scenario, large_object_clip

for coverage in (0.2, 0.4, 0.6, 0.8, 1.0):
    stream, truth = generate_scenario(large_object_clip(coverage))
    events = run_detector("alg2", stream)
    occl = [e.frame_index for e in events if e.kind is Kind.OCCLUSION]
    print(f"object covers {coverage:4.0%} of the view: occlusion alarms at {occl}")

# the combined detector looks at the same clip
stream, _ = generate_scenario(large_object_clip(1.0))
print("combined:", [(e.kind.value, e.frame_index) for e in run_detector("combined", stream)])
