"""
Diagnostic probe families
=========================

Three fixed prompt families stress specific failure modes: negative
constraints, semantic context pulling colors off target, and precise spatial
ratios. Here a simulated model answers the spatial family with a balanced
50/50 split regardless of the requested ratio, which the probe flags.
"""

import json
import tempfile
from pathlib import Path

from PIL import Image

from purecolor.config import ProviderConfig, RunConfig
from purecolor.generate import render_ground_truth
from purecolor.harness import PROBE_FAMILIES, probe_suite
from purecolor.regions import ExactTarget, HorizontalSplit, RegionSpec

root = Path(tempfile.mkdtemp(prefix="purecolor-demo-"))

for case in PROBE_FAMILIES["spatial"].cases:
    print(f"{case.name}: {case.prompt[:72]}...")
    # the simulated model ignores the ratio and always splits 50/50
    balanced = [
        RegionSpec(HorizontalSplit(0.5, "left"), case.regions[0].target),
        RegionSpec(HorizontalSplit(0.5, "right"), case.regions[1].target),
    ]
    img = render_ground_truth(balanced, 256)
    Image.fromarray(img, "RGB").save(root / f"probe-{case.name}.png")

provider = ProviderConfig(kind="filesystem", root=str(root))
report = probe_suite("spatial", provider, RunConfig(model_tag="always-50-50"))

print()
for case in report["cases"]:
    print(
        f"{case['case']}: requested {case['requested_fraction']:.3f}, "
        f"measured {case['measured_fraction']:.3f}, "
        f"deviation {case['deviation']:.3f}, "
        f"layout mismatch: {case['layout_mismatch']}"
    )

print("\nfull report record for the asymmetric case:")
asym = next(c for c in report["cases"] if c["case"] == "spatial-asym")
print(json.dumps(asym, indent=2)[:600], "...")
