"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Runtime-sensitive criteria assert their own wall-clock budgets. The large
dataset-cardinality check renders the full image set into a temp directory.
"""

import json
import math
import shutil
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from purecolor.color import ColorLevel, Rgb8, centroid_table, parse_hex, rgb_to_hsl
from purecolor.config import ProviderConfig, RunConfig
from purecolor.generate import (
    GenConfig,
    TEMPLATE_POOL_SIZES,
    generalization_split,
    generate_dataset,
    generate_plan,
    load_templates,
    read_manifest,
    render_ground_truth,
    stratified_split,
    target_colors,
)
from purecolor.harness import acquire_images, emit_report, run_eval
from purecolor.precision import (
    METRIC_NAMES,
    NormalizationConstants,
    ciede2000,
    normalize_and_aggregate,
    redmean_coefficients,
)
from purecolor.purity import (
    canny_edges,
    canny_edge_density,
    channel_stddev,
    high_freq_ratio,
    purity_aggregate,
)
from purecolor.regions import (
    EvalConfig,
    ExactTarget,
    Full,
    HorizontalSplit,
    RangeTarget,
    RegionSpec,
    evaluate_sample,
    measure_split_ratio,
)
from tests.test_precision import CIEDE2000_PAIRS

# Previously reported evaluation rows (per-variation, per-model): the six
# normalized precision columns with their printed mean, and the three purity
# columns with theirs. Used to validate the aggregation weights.
REPORTED_ROWS = [
    # (variation, model, [rgb_ed, rgb_rm, lab_00, lab_hue, lab_hyab, lab_ch], pre_mean,
    #  [sd, ced, hf], pur_mean)
    (1, "SANA", [0.288, 0.284, 0.331, 0.375, 0.145, 0.477], 0.319, [0.232, 0.028, 0.030], 0.097),
    (1, "Janus-Pro-1.5", [0.344, 0.343, 0.410, 0.561, 0.169, 0.527], 0.396, [0.193, 0.006, 0.004], 0.068),
    (1, "FLUX.1", [0.364, 0.357, 0.387, 0.403, 0.159, 0.469], 0.356, [0.044, 0.001, 0.001], 0.015),
    (1, "Qwen-Image", [0.156, 0.153, 0.180, 0.206, 0.077, 0.246], 0.171, [0.058, 0.002, 0.021], 0.027),
    (1, "OmniGen2", [0.397, 0.390, 0.402, 0.449, 0.178, 0.526], 0.390, [0.202, 0.070, 0.016], 0.096),
    (1, "Nano-Banana", [0.111, 0.108, 0.104, 0.091, 0.050, 0.149], 0.102, [0.011, 0.001, 0.001], 0.004),
    (1, "Seedream-4.5", [0.198, 0.193, 0.208, 0.246, 0.091, 0.277], 0.203, [0.215, 0.013, 0.023], 0.083),
    (1, "GPT-Image-1.5", [0.054, 0.053, 0.053, 0.050, 0.026, 0.080], 0.053, [0.013, 0.030, 0.001], 0.015),
    (2, "SANA", [0.315, 0.308, 0.352, 0.396, 0.157, 0.531], 0.346, [0.312, 0.019, 0.021], 0.118),
    (2, "Janus-Pro-1.5", [0.335, 0.327, 0.359, 0.511, 0.155, 0.480], 0.365, [0.216, 0.009, 0.012], 0.079),
    (2, "FLUX.1", [0.357, 0.353, 0.384, 0.448, 0.165, 0.490], 0.367, [0.117, 0.005, 0.005], 0.042),
    (2, "Qwen-Image", [0.128, 0.125, 0.143, 0.177, 0.065, 0.216], 0.143, [0.111, 0.007, 0.028], 0.049),
    (2, "OmniGen2", [0.388, 0.382, 0.396, 0.419, 0.185, 0.572], 0.390, [0.236, 0.036, 0.026], 0.099),
    (2, "Nano-Banana", [0.113, 0.111, 0.107, 0.105, 0.052, 0.157], 0.107, [0.226, 0.005, 0.005], 0.079),
    (2, "Seedream-4.5", [0.201, 0.195, 0.218, 0.286, 0.096, 0.294], 0.216, [0.421, 0.018, 0.043], 0.161),
    (2, "GPT-Image-1.5", [0.056, 0.055, 0.056, 0.061, 0.027, 0.086], 0.057, [0.265, 0.001, 0.002], 0.089),
    (3, "SANA", [0.369, 0.360, 0.401, 0.442, 0.187, 0.642], 0.403, [0.433, 0.030, 0.035], 0.166),
    (3, "Janus-Pro-1.5", [0.338, 0.334, 0.383, 0.514, 0.160, 0.476], 0.370, [0.220, 0.022, 0.024], 0.089),
    (3, "FLUX.1", [0.386, 0.379, 0.416, 0.473, 0.189, 0.602], 0.409, [0.142, 0.008, 0.008], 0.053),
    (3, "Qwen-Image", [0.229, 0.224, 0.264, 0.333, 0.115, 0.371], 0.258, [0.174, 0.015, 0.029], 0.073),
    (3, "OmniGen2", [0.410, 0.405, 0.433, 0.465, 0.204, 0.631], 0.425, [0.242, 0.024, 0.025], 0.097),
    (3, "Nano-Banana", [0.122, 0.119, 0.114, 0.113, 0.055, 0.161], 0.114, [0.338, 0.009, 0.011], 0.120),
    (3, "Seedream-4.5", [0.211, 0.203, 0.226, 0.305, 0.100, 0.306], 0.227, [0.520, 0.023, 0.053], 0.199),
    (3, "GPT-Image-1.5", [0.073, 0.071, 0.075, 0.083, 0.035, 0.108], 0.074, [0.364, 0.004, 0.006], 0.125),
]


def report_line(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {status}: {name}{suffix}", flush=True)
    assert ok, f"{name}{suffix}"


def test_aggregator_parity_on_reported_rows():
    t0 = time.perf_counter()
    identity = NormalizationConstants(
        maxima={name: 1.0 for name in METRIC_NAMES},
        weights={name: 1.0 / 6.0 for name in METRIC_NAMES},
    )
    worst = 0.0
    for variation, model, precision, pre_mean, purity, pur_mean in REPORTED_ROWS:
        got_pre = normalize_and_aggregate(dict(zip(METRIC_NAMES, precision)), identity).pre_mean
        got_pur = purity_aggregate(
            {"sd": purity[0] * 127.5, "ced": purity[1], "hf": purity[2]}
        ).pur_mean
        worst = max(worst, abs(got_pre - pre_mean), abs(got_pur - pur_mean))
        assert abs(got_pre - pre_mean) <= 0.005, (variation, model, got_pre, pre_mean)
        assert abs(got_pur - pur_mean) <= 0.005, (variation, model, got_pur, pur_mean)
    elapsed = time.perf_counter() - t0
    report_line(
        "aggregator parity on 24 reported rows (+-0.005)",
        elapsed < 1.0,
        f"worst |delta|={worst:.4f}, {elapsed:.2f}s",
    )


def test_ciede2000_published_pairs():
    t0 = time.perf_counter()
    worst = 0.0
    for l1, a1, b1, l2, a2, b2, expected in CIEDE2000_PAIRS:
        got = ciede2000((l1, a1, b1), (l2, a2, b2))
        worst = max(worst, abs(got - expected))
        assert abs(got - expected) <= 1e-4
    elapsed = time.perf_counter() - t0
    report_line(
        "CIEDE2000 matches all 34 published pairs (1e-4)",
        elapsed < 1.0 and len(CIEDE2000_PAIRS) == 34,
        f"worst |delta|={worst:.2e}, {elapsed:.2f}s",
    )


def test_end_to_end_zero_oracle(tmp_path):
    t0 = time.perf_counter()
    cfg = GenConfig(seed=7, out_dir=tmp_path / "d", workers=8).scaled(0.1)
    entries = generate_dataset(cfg)
    acq = acquire_images(
        entries, ProviderConfig(kind="filesystem", root=str(tmp_path / "d" / "gt"))
    )
    run = run_eval(entries, acq, RunConfig(model_tag="gt-oracle"))
    assert not acq.errors
    for label, agg in run.groups.items():
        assert agg["pre_mean"] == 0.0, label
        assert agg["pur_mean"] == 0.0, label
        assert agg["raw"]["sd"] < 1e-9, label
        assert agg["raw"]["ced"] == 0.0, label
        assert agg["raw"]["hf"] == 0.0, label
    emit_report(run, tmp_path / "report")
    elapsed = time.perf_counter() - t0
    report_line(
        "end-to-end zero oracle at 1/10 scale",
        elapsed < 120.0,
        f"{len(entries)} samples, {elapsed:.1f}s",
    )


def test_dataset_cardinality_full_scale():
    t0 = time.perf_counter()
    tmp = Path(tempfile.mkdtemp(prefix="purecolor-full-"))
    try:
        entries = generate_dataset(GenConfig(seed=7, out_dir=tmp, workers=8))
        per_var: dict[int, int] = {}
        for e in entries:
            per_var[e["variation"]] = per_var.get(e["variation"], 0) + 1
        assert per_var[1] == 3020
        assert per_var[2] == 12080
        assert per_var[3] == 18120
        assert len(entries) > 42000
        pool: dict[int, int] = {}
        for t in load_templates():
            pool[t.variation] = pool.get(t.variation, 0) + 1
        assert pool == TEMPLATE_POOL_SIZES == {1: 10, 2: 20, 3: 30, 4: 10, 5: 20, 6: 10}
        missing = sum(1 for e in entries if not (tmp / e["image"]).exists())
        assert missing == 0
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    elapsed = time.perf_counter() - t0
    report_line(
        "full-scale cardinality 3020/12080/18120, >42k total, pool 10/20/30/10/20/10",
        elapsed < 600.0,
        f"{len(entries)} entries, {elapsed:.0f}s",
    )


def test_split_correctness():
    t0 = time.perf_counter()
    entries = generate_plan(GenConfig(seed=7, out_dir="x").scaled(0.1))
    tagged = stratified_split(entries, ratio=0.8, seed=7)
    strata: dict[tuple, list[dict]] = {}
    for e in tagged:
        key = (e["variation"], e["level"], e["language"], e["color_space"])
        strata.setdefault(key, []).append(e)
    for key, members in strata.items():
        n_train = sum(1 for e in members if e["split"] == "train")
        if len(members) >= 2:
            assert abs(n_train - 0.8 * len(members)) <= 1.0, key
        assert all(e["split"] in ("train", "test") for e in members)

    singles = [e for e in entries if e["variation"] == 1]
    hue_tagged = generalization_split(singles, "hue1")
    expected_test = {
        e["id"] for e in singles if 280.0 <= rgb_to_hsl(target_colors(e)[0]).h < 320.0
    }
    got_test = {e["id"] for e in hue_tagged if e["gen_split"] == "test"}
    assert got_test == expected_test
    assert expected_test, "hue band unexpectedly empty"
    elapsed = time.perf_counter() - t0
    report_line(
        "stratified 8:2 within +-1 per stratum; hue-split test set is exactly [280,320)",
        elapsed < 30.0,
        f"{len(strata)} strata, {len(expected_test)} held-out hue samples, {elapsed:.1f}s",
    )


def test_fuzzy_semantics():
    t0 = time.perf_counter()
    low, high = parse_hex("#58321D"), parse_hex("#A65E35")
    regions = [RegionSpec(Full(), RangeTarget(low, high))]
    cfg = EvalConfig()

    # endpoints score exactly zero
    for endpoint in (low, high):
        img = np.full((256, 256, 3), endpoint.as_tuple(), dtype=np.uint8)
        assert evaluate_sample(img, regions, cfg).pre_mean == 0.0

    # interior points on the HSL segment score below 0.01
    from purecolor.color import Hsl, hsl_to_rgb
    lo_h = rgb_to_hsl(low)
    hi_h = rgb_to_hsl(high)
    for t in (0.25, 0.5, 0.75):
        mid = Hsl(
            lo_h.h + t * (hi_h.h - lo_h.h),
            lo_h.s + t * (hi_h.s - lo_h.s),
            lo_h.l + t * (hi_h.l - lo_h.l),
        )
        img = np.full((256, 256, 3), hsl_to_rgb(mid).as_tuple(), dtype=np.uint8)
        result = evaluate_sample(img, regions, cfg)
        assert result.pre_mean < 0.01, (t, result.pre_mean)
    elapsed = time.perf_counter() - t0
    report_line(
        "fuzzy range: in-segment means < 0.01, endpoints exactly 0",
        elapsed < 10.0,
        f"{elapsed:.2f}s",
    )


def test_purity_metric_properties():
    t0 = time.perf_counter()
    constant = np.full((256, 256, 3), (153, 102, 204), dtype=np.uint8)
    assert channel_stddev(constant) == 0.0
    assert canny_edge_density(constant) == 0.0
    assert high_freq_ratio(constant) == 0.0

    size = 256
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    checker = np.zeros((size, size, 3), dtype=np.uint8)
    checker[(yy + xx) % 2 == 1] = 255
    assert high_freq_ratio(checker) > 0.99

    half = np.zeros((size, size, 3), dtype=np.uint8)
    half[:, size // 2:] = 255
    edges = canny_edges(half)
    edge_columns = int(edges.any(axis=0).sum())
    assert edges.all(axis=0)[edges.any(axis=0)].all()  # full-height band
    assert 1 <= edge_columns <= 3

    base_noise = np.random.default_rng(123).uniform(-1.0, 1.0, (size, size, 3))
    prev_sd = -1.0
    for amplitude in (4, 16, 64):
        img = np.clip(128.0 + amplitude * base_noise, 0, 255).round().astype(np.uint8)
        sd = channel_stddev(img)
        assert sd >= prev_sd
        prev_sd = sd
    elapsed = time.perf_counter() - t0
    report_line(
        "purity properties: constant zero, checkerboard hf>0.99, 1-3 column edge band, sd ladder",
        elapsed < 10.0,
        f"edge band {edge_columns} cols, {elapsed:.2f}s",
    )


def test_split_ratio_probe():
    t0 = time.perf_counter()
    regions = [
        RegionSpec(HorizontalSplit(0.315, "left"), ExactTarget(parse_hex("#AB1213"))),
        RegionSpec(HorizontalSplit(0.315, "right"), ExactTarget(parse_hex("#000000"))),
    ]
    img = render_ground_truth(regions, 256)
    measured = measure_split_ratio(img, axis="horizontal")
    assert abs(measured.fraction - 81 / 256) <= 1 / 256
    elapsed = time.perf_counter() - t0
    report_line(
        "31.5/68.5 split measures 81/256 within 1/256",
        elapsed < 1.0,
        f"measured {measured.fraction:.4f}, {elapsed:.2f}s",
    )


def test_redmean_constant_weight_identity():
    t0 = time.perf_counter()
    expected = 4.0 + 255.0 / 256.0
    for rbar in np.linspace(0.0, 255.0, 256):
        w_r, w_b = redmean_coefficients(float(rbar))
        assert abs((w_r + w_b) - expected) <= 1e-12
    elapsed = time.perf_counter() - t0
    report_line(
        "red-mean weight sum constant 4+255/256 over 256 sampled means (1e-12)",
        elapsed < 1.0,
        f"{elapsed:.2f}s",
    )


def test_performance_1000_samples():
    rng = np.random.default_rng(99)
    cfg = EvalConfig()
    samples = []
    for i in range(1000):
        color = Rgb8(*(int(v) for v in rng.integers(0, 256, 3)))
        regions = [RegionSpec(Full(), ExactTarget(color))]
        img = render_ground_truth(regions, 256)
        if i % 2:
            noise = rng.integers(-20, 21, img.shape)
            img = np.clip(img.astype(np.int32) + noise, 0, 255).astype(np.uint8)
        samples.append((img, regions))
    t0 = time.perf_counter()
    for img, regions in samples:
        evaluate_sample(img, regions, cfg)
    elapsed = time.perf_counter() - t0
    report_line(
        "1000-sample full-suite evaluation under 60 s",
        elapsed < 60.0,
        f"{elapsed:.1f}s",
    )
