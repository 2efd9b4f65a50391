"""Sample-level evaluation: region geometry, fuzzy-range references, metric rollup.

A sample is an image plus a list of region specs that tile it exactly. Each
region is scored independently (precision against its resolved reference
color, purity on its own pixels) and the sample score is the arithmetic mean
over regions. Rectangle boundaries round half-up so ground-truth rendering
and evaluation agree bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from purecolor.color import Hsl, Rgb8, format_hex, hsl_to_rgb_float, parse_hex, rgb_to_hsl
from purecolor.precision import (
    METRIC_NAMES,
    NormalizationConstants,
    PrecisionReport,
    normalize_and_aggregate,
    pair_distances,
    representative_color,
)
from purecolor.purity import (
    PURITY_NAMES,
    CannyParams,
    PurityNorm,
    PurityReport,
    canny_edge_density,
    channel_stddev,
    high_freq_ratio,
    purity_aggregate,
)

__all__ = [
    "Rect",
    "Full",
    "HorizontalSplit",
    "VerticalSplit",
    "Quadrant",
    "ExactTarget",
    "RangeTarget",
    "RegionSpec",
    "EvalConfig",
    "RegionEval",
    "SampleReport",
    "SplitRatio",
    "FuzzyProjection",
    "round_half_up",
    "region_pixels",
    "validate_tiling",
    "fuzzy_reference",
    "evaluate_sample",
    "measure_split_ratio",
]


class Rect(NamedTuple):
    """Half-open pixel rectangle; x indexes columns, y indexes rows."""

    x0: int
    y0: int
    x1: int
    y1: int


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class Full:
    def rect(self, width: int, height: int) -> Rect:
        return Rect(0, 0, width, height)


@dataclass(frozen=True)
class HorizontalSplit:
    """Left/right blocks separated by a vertical boundary at fraction * width."""

    fraction: float
    side: str

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise ValueError("fraction must lie in (0, 1)")
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    def rect(self, width: int, height: int) -> Rect:
        b = round_half_up(self.fraction * width)
        if not 0 < b < width:
            raise ValueError(f"fraction {self.fraction} yields an empty block at width {width}")
        return Rect(0, 0, b, height) if self.side == "left" else Rect(b, 0, width, height)


@dataclass(frozen=True)
class VerticalSplit:
    """Top/bottom blocks separated by a horizontal boundary at fraction * height."""

    fraction: float
    side: str

    def __post_init__(self):
        if not 0.0 < self.fraction < 1.0:
            raise ValueError("fraction must lie in (0, 1)")
        if self.side not in ("top", "bottom"):
            raise ValueError("side must be 'top' or 'bottom'")

    def rect(self, width: int, height: int) -> Rect:
        b = round_half_up(self.fraction * height)
        if not 0 < b < height:
            raise ValueError(f"fraction {self.fraction} yields an empty block at height {height}")
        return Rect(0, 0, width, b) if self.side == "top" else Rect(0, b, width, height)


@dataclass(frozen=True)
class Quadrant:
    """2x2 grid cell; 0=top-left, 1=top-right, 2=bottom-left, 3=bottom-right."""

    index: int

    def __post_init__(self):
        if self.index not in (0, 1, 2, 3):
            raise ValueError("quadrant index must be 0..3")

    def rect(self, width: int, height: int) -> Rect:
        mx, my = width // 2, height // 2
        if mx < 1 or my < 1:
            raise ValueError(f"image {width}x{height} too small for quadrants")
        return (
            Rect(0, 0, mx, my),
            Rect(mx, 0, width, my),
            Rect(0, my, mx, height),
            Rect(mx, my, width, height),
        )[self.index]


Geometry = Union[Full, HorizontalSplit, VerticalSplit, Quadrant]


@dataclass(frozen=True)
class ExactTarget:
    color: Rgb8


@dataclass(frozen=True)
class RangeTarget:
    low: Rgb8
    high: Rgb8

    def __post_init__(self):
        if self.low == self.high:
            raise ValueError("range endpoints must be distinct")


ColorTarget = Union[ExactTarget, RangeTarget]


@dataclass(frozen=True)
class RegionSpec:
    geometry: Geometry
    target: ColorTarget

    def to_json(self) -> dict:
        g: dict
        if isinstance(self.geometry, Full):
            g = {"kind": "full"}
        elif isinstance(self.geometry, HorizontalSplit):
            g = {"kind": "hsplit", "fraction": self.geometry.fraction, "side": self.geometry.side}
        elif isinstance(self.geometry, VerticalSplit):
            g = {"kind": "vsplit", "fraction": self.geometry.fraction, "side": self.geometry.side}
        else:
            g = {"kind": "quadrant", "index": self.geometry.index}
        if isinstance(self.target, ExactTarget):
            t = {"kind": "exact", "color": format_hex(self.target.color)}
        else:
            t = {"kind": "range", "low": format_hex(self.target.low), "high": format_hex(self.target.high)}
        return {"geometry": g, "target": t}

    @classmethod
    def from_json(cls, obj: dict) -> "RegionSpec":
        g = obj["geometry"]
        kind = g["kind"]
        if kind == "full":
            geometry: Geometry = Full()
        elif kind == "hsplit":
            geometry = HorizontalSplit(float(g["fraction"]), g["side"])
        elif kind == "vsplit":
            geometry = VerticalSplit(float(g["fraction"]), g["side"])
        elif kind == "quadrant":
            geometry = Quadrant(int(g["index"]))
        else:
            raise ValueError(f"unknown geometry kind {kind!r}")
        t = obj["target"]
        if t["kind"] == "exact":
            target: ColorTarget = ExactTarget(parse_hex(t["color"]))
        elif t["kind"] == "range":
            target = RangeTarget(parse_hex(t["low"]), parse_hex(t["high"]))
        else:
            raise ValueError(f"unknown target kind {t['kind']!r}")
        return cls(geometry, target)


def region_pixels(geometry: Geometry, width: int, height: int) -> Rect:
    """Pixel rectangle of a region geometry on a width x height canvas."""
    if width < 2 or height < 2:
        raise ValueError("image must be at least 2x2")
    return geometry.rect(width, height)


def validate_tiling(regions, width: int, height: int) -> list[Rect]:
    """Resolve rectangles and require that they cover each pixel exactly once."""
    rects = [region_pixels(r.geometry, width, height) for r in regions]
    coverage = np.zeros((height, width), dtype=np.int32)
    for x0, y0, x1, y1 in rects:
        coverage[y0:y1, x0:x1] += 1
    if not (coverage == 1).all():
        raise ValueError("regions do not tile the image exactly")
    return rects


# --- fuzzy color ranges -------------------------------------------------------


class FuzzyProjection(NamedTuple):
    rgb: tuple[float, float, float]
    t: float
    hsl: Hsl


def _hsl_vector(h: float, s: float, l: float) -> np.ndarray:
    # hue scaled to unit range so no axis dominates the projection
    return np.array([h / 360.0, s, l])


def _shortest_arc(delta: float) -> float:
    return (delta + 180.0) % 360.0 - 180.0


def fuzzy_reference(v, c_low: Rgb8, c_high: Rgb8) -> FuzzyProjection:
    """Project a representative color onto the HSL segment between two bounds.

    Hues are unwrapped along the shorter arc between the endpoint hues and
    scaled to unit range; the projection parameter t is clamped to [0, 1]
    before the point is formed, so the reference always lies on the closed
    segment. Exact endpoint hits return the endpoint color bit-exactly.
    """
    if c_low == c_high:
        raise ValueError("range endpoints must be distinct")
    lo = rgb_to_hsl(c_low)
    hi_raw = rgb_to_hsl(c_high)
    # exact endpoint hits bypass the projection arithmetic, whose hue
    # unwrapping is only accurate to float round-off
    v_triple = tuple(float(x) for x in (v if not hasattr(v, "as_tuple") else v.as_tuple()))
    if v_triple == tuple(float(c) for c in c_low.as_tuple()):
        return FuzzyProjection(v_triple, 0.0, lo)
    if v_triple == tuple(float(c) for c in c_high.as_tuple()):
        return FuzzyProjection(v_triple, 1.0, hi_raw)
    hi_h = lo.h + _shortest_arc(hi_raw.h - lo.h)
    v_hsl = rgb_to_hsl(v)
    center = 0.5 * (lo.h + hi_h)
    v_h = center + _shortest_arc(v_hsl.h - center)

    p_lo = _hsl_vector(lo.h, lo.s, lo.l)
    p_hi = _hsl_vector(hi_h, hi_raw.s, hi_raw.l)
    p_v = _hsl_vector(v_h, v_hsl.s, v_hsl.l)
    seg = p_hi - p_lo
    t = float(np.dot(p_v - p_lo, seg) / np.dot(seg, seg))
    t = min(max(t, 0.0), 1.0)
    if t == 0.0:
        return FuzzyProjection((float(c_low.r), float(c_low.g), float(c_low.b)), 0.0, lo)
    if t == 1.0:
        return FuzzyProjection((float(c_high.r), float(c_high.g), float(c_high.b)), 1.0, hi_raw)
    point = p_lo + t * seg
    hsl = Hsl((point[0] * 360.0) % 360.0, float(point[1]), float(point[2]))
    return FuzzyProjection(hsl_to_rgb_float(hsl), t, hsl)


# --- sample evaluation --------------------------------------------------------


@dataclass(frozen=True)
class EvalConfig:
    """Everything evaluate_sample needs besides the image and its region specs."""

    resolution: int = 256
    precision: NormalizationConstants = field(default_factory=NormalizationConstants)
    purity: PurityNorm = field(default_factory=PurityNorm)
    canny: CannyParams = field(default_factory=CannyParams)
    cutoff_fraction: float = 0.25
    erosion: int = 0
    use_additive_hyab: bool = False


@dataclass(frozen=True)
class RegionEval:
    rect: Rect
    reference: tuple[float, float, float]
    representative: tuple[float, float, float]
    precision: PrecisionReport
    purity: PurityReport


@dataclass(frozen=True)
class SampleReport:
    regions: list[RegionEval]
    pre_mean: float
    pur_mean: float
    raw_means: dict[str, float]
    norm_means: dict[str, float]

    def to_json(self) -> dict:
        return {
            "pre_mean": self.pre_mean,
            "pur_mean": self.pur_mean,
            "raw": self.raw_means,
            "norm": self.norm_means,
            "regions": [
                {
                    "rect": list(r.rect),
                    "reference": list(r.reference),
                    "representative": list(r.representative),
                    "raw": r.precision.raw | r.purity.raw,
                    "norm": r.precision.normalized | r.purity.normalized,
                    "pre_mean": r.precision.pre_mean,
                    "pur_mean": r.purity.pur_mean,
                }
                for r in self.regions
            ],
        }


def _eroded(rect: Rect, margin: int) -> Rect:
    if margin <= 0:
        return rect
    out = Rect(rect.x0 + margin, rect.y0 + margin, rect.x1 - margin, rect.y1 - margin)
    if out.x0 >= out.x1 or out.y0 >= out.y1:
        raise ValueError(f"erosion margin {margin} empties region {rect}")
    return out


def evaluate_sample(image: np.ndarray, regions, config: EvalConfig | None = None) -> SampleReport:
    """Score one image against its region specs.

    Per region: representative color, reference resolution (exact target or
    fuzzy projection), six precision distances, three purity metrics. Sample
    scores are arithmetic means over regions.
    """
    cfg = config if config is not None else EvalConfig()
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError("image must be (H, W, 3)")
    h, w = image.shape[:2]
    if (h, w) != (cfg.resolution, cfg.resolution):
        raise ValueError(
            f"image is {w}x{h}, benchmark resolution is {cfg.resolution}x{cfg.resolution}"
        )
    rects = validate_tiling(regions, w, h)

    evals: list[RegionEval] = []
    for spec, rect in zip(regions, rects):
        rep = representative_color(image, rect)
        if isinstance(spec.target, ExactTarget):
            ref = tuple(float(v) for v in spec.target.color.as_tuple())
        else:
            ref = fuzzy_reference(tuple(rep), spec.target.low, spec.target.high).rgb
        raw = pair_distances(tuple(rep), ref, use_additive_hyab=cfg.use_additive_hyab)
        precision = normalize_and_aggregate(raw, cfg.precision)
        prect = _eroded(rect, cfg.erosion)
        purity_raw = {
            "sd": channel_stddev(image, prect),
            "ced": canny_edge_density(image, prect, cfg.canny),
            "hf": high_freq_ratio(image, prect, cfg.cutoff_fraction),
        }
        purity = purity_aggregate(purity_raw, cfg.purity)
        evals.append(RegionEval(rect, ref, tuple(float(v) for v in rep), precision, purity))

    n = len(evals)
    raw_means = {
        name: sum(r.precision.raw[name] for r in evals) / n for name in METRIC_NAMES
    } | {name: sum(r.purity.raw[name] for r in evals) / n for name in PURITY_NAMES}
    norm_means = {
        name: sum(r.precision.normalized[name] for r in evals) / n for name in METRIC_NAMES
    } | {name: sum(r.purity.normalized[name] for r in evals) / n for name in PURITY_NAMES}
    return SampleReport(
        regions=evals,
        pre_mean=sum(r.precision.pre_mean for r in evals) / n,
        pur_mean=sum(r.purity.pur_mean for r in evals) / n,
        raw_means=raw_means,
        norm_means=norm_means,
    )


# --- layout measurement -------------------------------------------------------


class SplitRatio(NamedTuple):
    fraction: float
    degenerate: bool


def measure_split_ratio(image: np.ndarray, axis: str = "horizontal") -> SplitRatio:
    """Estimate where a two-block image splits along an axis.

    Collapses the image to per-column (horizontal axis) or per-row mean
    colors and picks the boundary minimizing total within-segment squared
    deviation (1-D two-segment changepoint). Returns the left/top fraction.
    Constant images carry no boundary information and return 0.5 flagged as
    degenerate.
    """
    if axis not in ("horizontal", "vertical"):
        raise ValueError("axis must be 'horizontal' or 'vertical'")
    arr = image.astype(np.float64)
    profile = arr.mean(axis=0) if axis == "horizontal" else arr.mean(axis=1)
    n = profile.shape[0]
    if n < 2:
        raise ValueError("image too narrow to measure a split")
    if np.ptp(profile, axis=0).max() == 0.0:
        return SplitRatio(0.5, True)

    s1 = np.vstack([np.zeros(3), np.cumsum(profile, axis=0)])
    s2 = np.vstack([np.zeros(3), np.cumsum(profile ** 2, axis=0)])
    k = np.arange(1, n)[:, None].astype(np.float64)
    left_sse = s2[1:-1] - s1[1:-1] ** 2 / k
    right_sse = (s2[-1] - s2[1:-1]) - (s1[-1] - s1[1:-1]) ** 2 / (n - k)
    total = (left_sse + right_sse).sum(axis=1)
    best = int(np.argmin(total)) + 1
    return SplitRatio(best / n, False)
