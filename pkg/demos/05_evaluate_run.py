"""
End-to-end evaluation run
=========================

Evaluate two "models" against a small benchmark: the ground truth itself
(a perfect model, every score exactly zero) and a biased model that shifts
colors and adds noise.
"""

import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from purecolor.config import ProviderConfig, RunConfig
from purecolor.generate import GenConfig, generate_dataset
from purecolor.harness import acquire_images, emit_report, run_eval

out = Path(tempfile.mkdtemp(prefix="purecolor-demo-"))
entries = generate_dataset(GenConfig(counts=(20, 5, 3, 0, 0, 0), seed=3, out_dir=out))

# model A: returns the ground truth unchanged
gt_provider = ProviderConfig(kind="filesystem", root=str(out / "gt"))
run = run_eval(entries, acquire_images(entries, gt_provider), RunConfig(model_tag="oracle"))
print("oracle model:")
for label, agg in run.groups.items():
    print(f"  {label}: precision={agg['pre_mean']:.4f} purity={agg['pur_mean']:.4f}")

# model B: +12 red shift and mild noise on every output
biased_root = out / "biased"
biased_root.mkdir()
rng = np.random.default_rng(0)
for e in entries:
    img = np.asarray(Image.open(out / e["image"]).convert("RGB")).astype(np.int32)
    img[..., 0] += 12
    img += rng.integers(-6, 7, img.shape)
    Image.fromarray(np.clip(img, 0, 255).astype(np.uint8), "RGB").save(
        biased_root / f"{e['id']}.png"
    )

biased_provider = ProviderConfig(kind="filesystem", root=str(biased_root))
run_b = run_eval(entries, acquire_images(entries, biased_provider), RunConfig(model_tag="biased"))
print("biased model:")
for label, agg in run_b.groups.items():
    print(f"  {label}: precision={agg['pre_mean']:.4f} purity={agg['pur_mean']:.4f}")

paths = emit_report(run_b, out / "report")
print("\nreport files:")
for p in paths:
    print(" ", p)
print("\nmarkdown table:")
print((out / "report" / "report.md").read_text())
