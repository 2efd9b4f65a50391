"""
The six color-precision distances
=================================

Raw distances between a generated color and its target, their [0,1]
normalization, and the weighted precision mean.
"""

from purecolor.color import parse_hex
from purecolor.precision import (
    METRIC_NAMES,
    NormalizationConstants,
    normalize_and_aggregate,
    pair_distances,
)

target = parse_hex("#9966CC")

for other_hex in ["#9966CC", "#9A67CD", "#A070C0", "#000000"]:
    other = parse_hex(other_hex)
    raw = pair_distances(other, target)
    report = normalize_and_aggregate(raw)
    print(f"\n{other_hex} vs #9966CC")
    for name in METRIC_NAMES:
        print(f"  {name:9} raw={raw[name]:10.4f}  normalized={report.normalized[name]:.4f}")
    print(f"  precision mean = {report.pre_mean:.4f}")

# the normalization constants are plain data: serialize, edit, reload
constants = NormalizationConstants()
text = constants.to_text()
print("\ndefault constants (first lines):")
print("\n".join(text.splitlines()[:4]))
assert NormalizationConstants.from_text(text) == constants
