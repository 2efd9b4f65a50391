"""Benchmark synthesis: prompt templates, ground-truth rendering, manifests, splits.

Six sample variations are produced from a single seeded plan:

  1 - one color filling the image          4 - a color anywhere in a bounded range
  2 - two blocks (left/right or top/bottom) 5 - variation 1 in Chinese and French
  3 - four quadrant blocks                  6 - variation 1 in rgb()/hsl() notation

Each base draw of variation 2 expands over {left-right, top-bottom} x {two
color orders} (x4) and each base draw of variation 3 over six quadrant
assignment patterns (x6). With the default base count of 3020 per variation
this yields 3020 / 12080 / 18120 / 3020 / 6040 / 6040 manifest entries.

Ground truth is rendered pixel-exactly from the region specs and stored as
8-bit RGB PNG. Prompts describing a layout use the conventional phrasing in
which top/bottom blocks are "divided horizontally" (the dividing line is
horizontal) and left/right blocks are "divided vertically".
"""

from __future__ import annotations

import hashlib
import json
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from purecolor.color import (
    ColorLevel,
    Hsl,
    Rgb8,
    format_hex,
    hsl_to_rgb,
    parse_hex,
    rgb_to_hsl,
    sample_color,
)
from purecolor.regions import (
    ExactTarget,
    Full,
    HorizontalSplit,
    Quadrant,
    RangeTarget,
    RegionSpec,
    VerticalSplit,
    region_pixels,
    round_half_up,
    validate_tiling,
)

__all__ = [
    "PromptTemplate",
    "GenConfig",
    "load_templates",
    "format_color",
    "render_ground_truth",
    "generate_plan",
    "generate_dataset",
    "write_manifest",
    "read_manifest",
    "stratified_split",
    "generalization_split",
    "target_colors",
]

TEMPLATE_POOL_SIZES = {1: 10, 2: 20, 3: 30, 4: 10, 5: 20, 6: 10}

_COLOR_ARITY = {1: {"color"}, 2: {"color_1", "color_2"}, 3: {"color_1", "color_2", "color_3", "color_4"}, 4: {"low", "high"}, 5: {"color"}, 6: {"color"}}
_LAYOUT_FIELDS = {"division", "side1", "side2"}

# quadrant assignment patterns for variation 3: which base color lands in
# quadrants (TL, TR, BL, BR)
QUAD_PATTERNS = (
    (0, 1, 2, 3),
    (1, 2, 3, 0),
    (2, 3, 0, 1),
    (3, 0, 1, 2),
    (0, 2, 1, 3),
    (1, 3, 0, 2),
)


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    variation: int
    language: str
    color_space: str
    text: str

    def fields(self) -> set[str]:
        return {name for _, name, _, _ in string.Formatter().parse(self.text) if name}

    def render(self, **values: str) -> str:
        return self.text.format(**values)


_templates: list[PromptTemplate] | None = None


def load_templates() -> list[PromptTemplate]:
    """Load and validate the bundled 100-template pool."""
    global _templates
    if _templates is not None:
        return _templates
    text = resources.files("purecolor.data").joinpath("templates.tsv").read_text("utf-8")
    out: list[PromptTemplate] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ValueError(f"templates line {lineno}: expected 5 tab-separated fields")
        tid, var_s, lang, space, body = parts
        if tid in seen:
            raise ValueError(f"templates line {lineno}: duplicate id {tid!r}")
        seen.add(tid)
        t = PromptTemplate(tid, int(var_s), lang, space, body)
        required = _COLOR_ARITY[t.variation]
        extra = t.fields() - required - (_LAYOUT_FIELDS if t.variation == 2 else set())
        if not required <= t.fields() or extra:
            raise ValueError(f"template {tid}: placeholder set {t.fields()} invalid")
        out.append(t)
    counts: dict[int, int] = {}
    for t in out:
        counts[t.variation] = counts.get(t.variation, 0) + 1
    if counts != TEMPLATE_POOL_SIZES:
        raise ValueError(f"template pool sizes {counts} != {TEMPLATE_POOL_SIZES}")
    _templates = out
    return out


def format_color(c: Rgb8, space: str) -> str:
    """Render a color as a prompt fragment in hex, rgb() or hsl() notation."""
    if space == "hex":
        return format_hex(c)
    if space == "rgb":
        return f"rgb({c.r}, {c.g}, {c.b})"
    if space == "hsl":
        h, s, l = rgb_to_hsl(c)
        return f"hsl({int(round(h)) % 360}, {int(round(s * 100))}%, {int(round(l * 100))}%)"
    raise ValueError(f"unknown color space {space!r}")


def _parse_hsl_fragment(text: str) -> Rgb8:
    inner = text[text.index("(") + 1 : text.index(")")]
    h_s, s_s, l_s = (part.strip() for part in inner.split(","))
    return hsl_to_rgb(Hsl(float(h_s), float(s_s.rstrip("%")) / 100.0, float(l_s.rstrip("%")) / 100.0))


@dataclass
class GenConfig:
    """Dataset synthesis settings; defaults reproduce the published cardinalities."""

    resolution: int = 256
    seed: int = 0
    # base draw counts per variation; variations 2/3 expand x4/x6
    counts: tuple[int, int, int, int, int, int] = (3020, 3020, 3020, 3020, 3020, 3020)
    level_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    out_dir: str | Path = "dataset"
    workers: int = 8

    def __post_init__(self):
        if self.resolution < 8:
            raise ValueError("resolution must be >= 8")
        if any(n < 0 for n in self.counts):
            raise ValueError("counts must be non-negative")
        if abs(sum(self.level_mix) - 1.0) > 1e-9 or any(w < 0 for w in self.level_mix):
            raise ValueError("level_mix must be a probability vector")

    def scaled(self, factor: float) -> "GenConfig":
        return GenConfig(
            resolution=self.resolution,
            seed=self.seed,
            counts=tuple(round_half_up(n * factor) for n in self.counts),
            level_mix=self.level_mix,
            out_dir=self.out_dir,
            workers=self.workers,
        )


def render_ground_truth(regions, resolution: int) -> np.ndarray:
    """Render the pixel-exact image for a list of region specs.

    Exact targets fill their rectangles with the target color. Range targets
    have no unique answer; their stand-in renders the low endpoint, which
    lies exactly on the acceptable segment.
    """
    validate_tiling(regions, resolution, resolution)
    img = np.zeros((resolution, resolution, 3), dtype=np.uint8)
    for spec in regions:
        x0, y0, x1, y1 = region_pixels(spec.geometry, resolution, resolution)
        color = spec.target.color if isinstance(spec.target, ExactTarget) else spec.target.low
        img[y0:y1, x0:x1] = color.as_tuple()
    return img


def _sample_id(*parts) -> str:
    blob = "|".join(str(p) for p in parts).encode("utf-8")
    return hashlib.sha1(blob).hexdigest()[:12]


def _pick_level(rng, mix) -> ColorLevel:
    idx = int(rng.choice(3, p=np.asarray(mix, dtype=np.float64)))
    return (ColorLevel.LEVEL_1, ColorLevel.LEVEL_2, ColorLevel.LEVEL_3)[idx]


def _entry(sample_id, variation, language, space, level, template, prompt, regions, **extra):
    e = {
        "id": sample_id,
        "variation": variation,
        "language": language,
        "color_space": space,
        "level": level.value,
        "template": template.id,
        "prompt": prompt,
        "regions": [r.to_json() for r in regions],
        "image": f"gt/{sample_id}.png",
    }
    e.update(extra)
    return e


_SIDE_TERMS = {
    "lr": {"division": "vertically", "side1": "left", "side2": "right"},
    "tb": {"division": "horizontally", "side1": "top", "side2": "bottom"},
}


def generate_plan(cfg: GenConfig) -> list[dict]:
    """Deterministically plan every manifest entry (no images written)."""
    templates = load_templates()
    by_var: dict[tuple, list[PromptTemplate]] = {}
    for t in templates:
        by_var.setdefault((t.variation, t.language, t.color_space), []).append(t)

    rng = np.random.default_rng(cfg.seed)
    entries: list[dict] = []
    ids: set[str] = set()

    def push(entry):
        if entry["id"] in ids:
            raise RuntimeError(f"sample id collision: {entry['id']}")
        ids.add(entry["id"])
        entries.append(entry)

    def pick_template(variation, language="en", space="hex"):
        pool = by_var[(variation, language, space)]
        return pool[int(rng.integers(len(pool)))]

    n1, n2, n3, n4, n5, n6 = cfg.counts

    # variation 1: single color
    for i in range(n1):
        level = _pick_level(rng, cfg.level_mix)
        color = sample_color(level, rng)
        t = pick_template(1)
        regions = [RegionSpec(Full(), ExactTarget(color))]
        sid = _sample_id("v1", i, t.id, format_hex(color))
        push(_entry(sid, 1, "en", "hex", level, t, t.render(color=format_hex(color)), regions))

    # variation 2: two blocks, expanded over layout x color order
    for i in range(n2):
        level = _pick_level(rng, cfg.level_mix)
        c1 = sample_color(level, rng)
        c2 = sample_color(level, rng)
        while c2 == c1:
            c2 = sample_color(level, rng)
        t = pick_template(2)
        for layout in ("lr", "tb"):
            for order, pair in enumerate(((c1, c2), (c2, c1))):
                terms = _SIDE_TERMS[layout]
                if layout == "lr":
                    regions = [
                        RegionSpec(HorizontalSplit(0.5, "left"), ExactTarget(pair[0])),
                        RegionSpec(HorizontalSplit(0.5, "right"), ExactTarget(pair[1])),
                    ]
                else:
                    regions = [
                        RegionSpec(VerticalSplit(0.5, "top"), ExactTarget(pair[0])),
                        RegionSpec(VerticalSplit(0.5, "bottom"), ExactTarget(pair[1])),
                    ]
                prompt = t.render(
                    color_1=format_hex(pair[0]), color_2=format_hex(pair[1]), **terms
                )
                sid = _sample_id("v2", i, t.id, layout, order, *map(format_hex, pair))
                push(_entry(sid, 2, "en", "hex", level, t, prompt, regions, layout=layout))

    # variation 3: quadrants, expanded over assignment patterns
    for i in range(n3):
        level = _pick_level(rng, cfg.level_mix)
        base = [sample_color(level, rng) for _ in range(4)]
        t = pick_template(3)
        for k, pattern in enumerate(QUAD_PATTERNS):
            assigned = [base[p] for p in pattern]
            regions = [RegionSpec(Quadrant(q), ExactTarget(assigned[q])) for q in range(4)]
            prompt = t.render(**{f"color_{q + 1}": format_hex(assigned[q]) for q in range(4)})
            sid = _sample_id("v3", i, t.id, k, *map(format_hex, assigned))
            push(_entry(sid, 3, "en", "hex", level, t, prompt, regions, pattern=k))

    # variation 4: bounded color range; ground truth stands in at the low endpoint
    for i in range(n4):
        level = _pick_level(rng, cfg.level_mix)
        low = sample_color(level, rng)
        h, s, l = rgb_to_hsl(low)
        high = low
        while high == low:
            dh = float(rng.uniform(-40.0, 40.0))
            ds = float(rng.uniform(-0.15, 0.15))
            dl = float(rng.uniform(-0.15, 0.15))
            high = hsl_to_rgb(
                Hsl((h + dh) % 360.0, min(max(s + ds, 0.0), 1.0), min(max(l + dl, 0.02), 0.98))
            )
        t = pick_template(4)
        regions = [RegionSpec(Full(), RangeTarget(low, high))]
        prompt = t.render(low=format_hex(low), high=format_hex(high))
        sid = _sample_id("v4", i, t.id, format_hex(low), format_hex(high))
        push(_entry(sid, 4, "en", "hex", level, t, prompt, regions, gt_note="range-endpoint-low"))

    # variation 5: single color in Chinese and French
    for language in ("zh", "fr"):
        for i in range(n5):
            level = _pick_level(rng, cfg.level_mix)
            color = sample_color(level, rng)
            t = pick_template(5, language=language)
            regions = [RegionSpec(Full(), ExactTarget(color))]
            sid = _sample_id("v5", language, i, t.id, format_hex(color))
            push(
                _entry(sid, 5, language, "hex", level, t, t.render(color=format_hex(color)), regions)
            )

    # variation 6: single color in rgb()/hsl() notation; the hsl() form rounds
    # to integer degrees/percents, so the target is re-derived from the prompt
    # fragment to keep instruction and ground truth exactly consistent
    for space in ("rgb", "hsl"):
        for i in range(n6):
            level = _pick_level(rng, cfg.level_mix)
            drawn = sample_color(level, rng)
            fragment = format_color(drawn, space)
            target = drawn if space == "rgb" else _parse_hsl_fragment(fragment)
            t = pick_template(6, space=space)
            regions = [RegionSpec(Full(), ExactTarget(target))]
            sid = _sample_id("v6", space, i, t.id, fragment)
            push(_entry(sid, 6, "en", space, level, t, t.render(color=fragment), regions))

    return entries


def write_manifest(entries, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for e in entries:
            f.write(json.dumps(e, ensure_ascii=False) + "\n")


def read_manifest(path: str | Path) -> list[dict]:
    entries = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def _write_png(img: np.ndarray, path: Path) -> None:
    Image.fromarray(img, "RGB").save(path, format="PNG")


def generate_dataset(cfg: GenConfig) -> list[dict]:
    """Plan the dataset, render every ground-truth image, write the manifest."""
    entries = generate_plan(cfg)
    out = Path(cfg.out_dir)
    gt_dir = out / "gt"
    gt_dir.mkdir(parents=True, exist_ok=True)

    def render_one(e):
        regions = [RegionSpec.from_json(r) for r in e["regions"]]
        _write_png(render_ground_truth(regions, cfg.resolution), out / e["image"])

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        list(pool.map(render_one, entries))
    write_manifest(entries, out / "manifest.jsonl")
    return entries


# --- splits -------------------------------------------------------------------


def _stratum_key(entry) -> tuple:
    return (entry["variation"], entry["level"], entry["language"], entry["color_space"])


def stratified_split(entries, ratio: float = 0.8, seed: int = 0) -> list[dict]:
    """Tag entries train/test per (variation, level, language, color-space) stratum.

    Each stratum is split within +/-1 of the requested train ratio; strata
    with fewer than two entries go entirely to train with a warning tag.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    strata: dict[tuple, list[int]] = {}
    for idx, e in enumerate(entries):
        strata.setdefault(_stratum_key(e), []).append(idx)

    tagged = [dict(e) for e in entries]
    for key in sorted(strata):
        idxs = strata[key]
        if len(idxs) < 2:
            for i in idxs:
                tagged[i]["split"] = "train"
                tagged[i]["split_warning"] = "stratum-too-small"
            continue
        order = rng.permutation(len(idxs))
        n_train = min(max(round_half_up(ratio * len(idxs)), 1), len(idxs) - 1)
        for rank, j in enumerate(order):
            tagged[idxs[j]]["split"] = "train" if rank < n_train else "test"
    return tagged


def target_colors(entry) -> list[Rgb8]:
    """The exact target colors of an entry (range targets contribute nothing)."""
    out = []
    for r in entry["regions"]:
        if r["target"]["kind"] == "exact":
            out.append(parse_hex(r["target"]["color"]))
    return out


HUE_SPLIT1_BAND = (280.0, 320.0)
HUE_SPLIT2_TRAIN_BANDS = ((0.0, 60.0), (120.0, 180.0), (240.0, 300.0))


def generalization_split(entries, strategy: str, seed: int = 0, holdout_fraction: float = 0.2):
    """Tag single-color entries for generalization studies.

    prompt: hold out a seeded subset of template ids (default 20%).
    hue1:   test = target hue inside [280, 320) degrees.
    hue2:   train = hue inside [0,60) u [120,180) u [240,300); the rest test.
    """
    if strategy not in ("prompt", "hue1", "hue2"):
        raise ValueError(f"unknown strategy {strategy!r}")
    for e in entries:
        colors = target_colors(e)
        if len(e["regions"]) != 1 or len(colors) != 1:
            raise ValueError(f"entry {e['id']} is not a single-exact-color sample")

    tagged = [dict(e) for e in entries]
    if strategy == "prompt":
        template_ids = sorted({e["template"] for e in entries})
        n_hold = max(1, round_half_up(holdout_fraction * len(template_ids)))
        rng = np.random.default_rng(seed)
        held = set(rng.permutation(template_ids)[:n_hold].tolist())
        for e in tagged:
            e["gen_split"] = "test" if e["template"] in held else "train"
        return tagged

    for e in tagged:
        hue = rgb_to_hsl(target_colors(e)[0]).h
        if strategy == "hue1":
            lo, hi = HUE_SPLIT1_BAND
            e["gen_split"] = "test" if lo <= hue < hi else "train"
        else:
            in_train = any(lo <= hue < hi for lo, hi in HUE_SPLIT2_TRAIN_BANDS)
            e["gen_split"] = "train" if in_train else "test"
    return tagged
