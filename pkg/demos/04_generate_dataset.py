"""
Synthesizing a benchmark dataset
================================

Plan a small seeded dataset, render its ground-truth images, and tag the
manifest with stratified and hue-based splits.
"""

import json
import tempfile
from pathlib import Path

from purecolor.generate import (
    GenConfig,
    generalization_split,
    generate_dataset,
    stratified_split,
)

out = Path(tempfile.mkdtemp(prefix="purecolor-demo-"))
cfg = GenConfig(counts=(30, 6, 3, 6, 4, 4), seed=7, out_dir=out)
entries = generate_dataset(cfg)

per_var = {}
for e in entries:
    per_var[e["variation"]] = per_var.get(e["variation"], 0) + 1
print("entries per variation:", dict(sorted(per_var.items())))
print("images under:", out / "gt")

print("\nfirst two manifest lines:")
for e in entries[:2]:
    print(json.dumps(e, ensure_ascii=False)[:120], "...")

# 8:2 stratified split preserves variation / level / language / format strata
tagged = stratified_split(entries, ratio=0.8, seed=7)
n_train = sum(1 for e in tagged if e["split"] == "train")
print(f"\nstratified split: {n_train} train / {len(tagged) - n_train} test")

# hue-based generalization split over the single-color samples
singles = [e for e in entries if e["variation"] == 1]
hue_tagged = generalization_split(singles, "hue1")
held = [e["id"] for e in hue_tagged if e["gen_split"] == "test"]
print(f"hue-split holds out {len(held)} of {len(singles)} single-color samples (purple band)")
