"""Color-precision distances and their [0,1] normalization.

Six distances are computed between a region's representative color and its
reference color: two in RGB space (plain Euclidean and the red-mean weighted
variant) and four in CIELAB (CIEDE2000, circular hue difference, chroma-only
difference, and a hybrid chroma+lightness distance). Each raw distance is
divided by a per-metric maximum, clipped at 1, and the weighted mean of the
normalized values is the precision score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from purecolor.color import Lab, Lch, lab_to_lch, srgb_to_lab

__all__ = [
    "METRIC_NAMES",
    "rgb_euclidean",
    "redmean_coefficients",
    "rgb_redmean",
    "ciede2000",
    "hue_mae",
    "delta_chroma",
    "hyab",
    "hyab_additive",
    "pair_distances",
    "representative_color",
    "NormalizationConstants",
    "PrecisionReport",
    "normalize_and_aggregate",
    "scan_gamut_maxima",
]

METRIC_NAMES = ("rgb_ed", "rgb_rm", "lab_00", "lab_hue", "lab_hyab", "lab_ch")

_POW25_7 = 25.0 ** 7


def _rgb(c):
    if hasattr(c, "as_tuple"):
        c = c.as_tuple()
    r, g, b = c
    return float(r), float(g), float(b)


def rgb_euclidean(c1, c2) -> float:
    """Euclidean distance across the three RGB channels."""
    r1, g1, b1 = _rgb(c1)
    r2, g2, b2 = _rgb(c2)
    return math.sqrt((r1 - r2) ** 2 + (g1 - g2) ** 2 + (b1 - b2) ** 2)


def redmean_coefficients(rbar: float) -> tuple[float, float]:
    """Red/blue channel weights as a function of the mean red value."""
    return 2.0 + rbar / 256.0, 2.0 + (255.0 - rbar) / 256.0


def rgb_redmean(c1, c2) -> float:
    """RGB distance with red-level-adaptive channel weights.

    The red and blue weights shift with the mean red value of the pair
    (their sum is the constant 4 + 255/256); green is fixed at 4.
    """
    r1, g1, b1 = _rgb(c1)
    r2, g2, b2 = _rgb(c2)
    rbar = 0.5 * (r1 + r2)
    w_r, w_b = redmean_coefficients(rbar)
    return math.sqrt(w_r * (r1 - r2) ** 2 + 4.0 * (g1 - g2) ** 2 + w_b * (b1 - b2) ** 2)


def ciede2000(lab1, lab2):
    """CIEDE2000 color difference with kL = kC = kH = 1.

    Accepts Lab triples or (..., 3) arrays; returns a float for single pairs
    and an array otherwise.
    """
    v1 = np.asarray(lab1, dtype=np.float64)
    v2 = np.asarray(lab2, dtype=np.float64)
    scalar = v1.ndim == 1 and v2.ndim == 1
    v1, v2 = np.atleast_2d(v1), np.atleast_2d(v2)
    L1, a1, b1 = v1[..., 0], v1[..., 1], v1[..., 2]
    L2, a2, b2 = v2[..., 0], v2[..., 1], v2[..., 2]

    C1 = np.hypot(a1, b1)
    C2 = np.hypot(a2, b2)
    cbar7 = (0.5 * (C1 + C2)) ** 7
    G = 0.5 * (1.0 - np.sqrt(cbar7 / (cbar7 + _POW25_7)))
    a1p = (1.0 + G) * a1
    a2p = (1.0 + G) * a2
    C1p = np.hypot(a1p, b1)
    C2p = np.hypot(a2p, b2)
    h1p = np.where((a1p == 0.0) & (b1 == 0.0), 0.0, np.degrees(np.arctan2(b1, a1p)) % 360.0)
    h2p = np.where((a2p == 0.0) & (b2 == 0.0), 0.0, np.degrees(np.arctan2(b2, a2p)) % 360.0)

    dLp = L2 - L1
    dCp = C2p - C1p
    prod = C1p * C2p
    diff = h2p - h1p
    dhp = np.where(np.abs(diff) <= 180.0, diff, np.where(diff > 180.0, diff - 360.0, diff + 360.0))
    dhp = np.where(prod == 0.0, 0.0, dhp)
    dHp = 2.0 * np.sqrt(prod) * np.sin(np.radians(dhp) / 2.0)

    Lbp = 0.5 * (L1 + L2)
    Cbp = 0.5 * (C1p + C2p)
    hsum = h1p + h2p
    hbp = np.where(
        np.abs(h1p - h2p) <= 180.0,
        0.5 * hsum,
        np.where(hsum < 360.0, 0.5 * (hsum + 360.0), 0.5 * (hsum - 360.0)),
    )
    hbp = np.where(prod == 0.0, hsum, hbp)

    T = (
        1.0
        - 0.17 * np.cos(np.radians(hbp - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * hbp))
        + 0.32 * np.cos(np.radians(3.0 * hbp + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * hbp - 63.0))
    )
    dtheta = 30.0 * np.exp(-(((hbp - 275.0) / 25.0) ** 2))
    cbp7 = Cbp ** 7
    RC = 2.0 * np.sqrt(cbp7 / (cbp7 + _POW25_7))
    SL = 1.0 + (0.015 * (Lbp - 50.0) ** 2) / np.sqrt(20.0 + (Lbp - 50.0) ** 2)
    SC = 1.0 + 0.045 * Cbp
    SH = 1.0 + 0.015 * Cbp * T
    RT = -np.sin(np.radians(2.0 * dtheta)) * RC

    tL = dLp / SL
    tC = dCp / SC
    tH = dHp / SH
    out = np.sqrt(tL * tL + tC * tC + tH * tH + RT * tC * tH)
    return float(out[0]) if scalar else out


def hue_mae(v1: Lch, v2: Lch) -> float:
    """Circular hue-angle distance in degrees, in [0, 180].

    Near-achromatic inputs (chroma below 1e-4) have no meaningful hue, so
    the distance is defined as 0 for them.
    """
    if v1[1] < 1e-4 or v2[1] < 1e-4:
        return 0.0
    d = abs(v1[2] - v2[2])
    return min(d, 360.0 - d)


def delta_chroma(v1: Lab, v2: Lab) -> float:
    """Chromatic difference sqrt(da^2 + db^2); independent of lightness."""
    return math.hypot(v2[1] - v1[1], v2[2] - v1[2])


def hyab(v1: Lab, v2: Lab) -> float:
    """Hybrid distance sqrt(da^2 + db^2 + |dL|), the form used throughout."""
    return math.sqrt((v2[1] - v1[1]) ** 2 + (v2[2] - v1[2]) ** 2 + abs(v2[0] - v1[0]))


def hyab_additive(v1: Lab, v2: Lab) -> float:
    """Common literature variant |dL| + sqrt(da^2 + db^2); off by default."""
    return abs(v2[0] - v1[0]) + math.hypot(v2[1] - v1[1], v2[2] - v1[2])


def pair_distances(c1, c2, use_additive_hyab: bool = False) -> dict[str, float]:
    """All six raw distances between two RGB colors (Rgb8 or real triples)."""
    lab1 = srgb_to_lab(c1)
    lab2 = srgb_to_lab(c2)
    hy = hyab_additive(lab1, lab2) if use_additive_hyab else hyab(lab1, lab2)
    return {
        "rgb_ed": rgb_euclidean(c1, c2),
        "rgb_rm": rgb_redmean(c1, c2),
        "lab_00": ciede2000(lab1, lab2),
        "lab_hue": hue_mae(lab_to_lch(lab1), lab_to_lch(lab2)),
        "lab_hyab": hy,
        "lab_ch": delta_chroma(lab1, lab2),
    }


def representative_color(image: np.ndarray, rect) -> np.ndarray:
    """Per-channel mean color of a rectangular region, kept in real precision.

    `rect` is (x0, y0, x1, y1) with half-open bounds; x indexes columns.
    """
    x0, y0, x1, y1 = rect
    h, w = image.shape[:2]
    if not (0 <= x0 < x1 <= w and 0 <= y0 < y1 <= h):
        raise ValueError(f"empty or out-of-bounds region {rect} for image {w}x{h}")
    block = image[y0:y1, x0:x1]
    return block.reshape(-1, image.shape[2]).mean(axis=0, dtype=np.float64)


# --- normalization -----------------------------------------------------------

# Closed-form maxima for the RGB metrics and hue; brute-force sRGB-gamut maxima
# for the three remaining Lab metrics, from scan_gamut_maxima(17).
DEFAULT_MAXIMA = {
    "rgb_ed": 255.0 * math.sqrt(3.0),
    "rgb_rm": 255.0 * math.sqrt(8.0 + 255.0 / 256.0),
    "lab_00": 119.46565369520664,
    "lab_hue": 180.0,
    "lab_hyab": 252.78218426414608,
    "lab_ch": 252.67250537361733,
}


@dataclass(frozen=True)
class NormalizationConstants:
    """Per-metric positive divisors and non-negative weights summing to 1."""

    maxima: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_MAXIMA))
    weights: dict[str, float] = field(
        default_factory=lambda: {name: 1.0 / 6.0 for name in METRIC_NAMES}
    )

    def __post_init__(self):
        for name in METRIC_NAMES:
            if name not in self.maxima or name not in self.weights:
                raise ValueError(f"missing constants for metric {name!r}")
            if not self.maxima[name] > 0.0:
                raise ValueError(f"maximum for {name!r} must be positive")
            if self.weights[name] < 0.0:
                raise ValueError(f"weight for {name!r} must be non-negative")
        total = sum(self.weights[name] for name in METRIC_NAMES)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1")

    def to_text(self) -> str:
        lines = []
        for name in METRIC_NAMES:
            lines.append(f"{name}.max = {self.maxima[name]!r}")
            lines.append(f"{name}.weight = {self.weights[name]!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "NormalizationConstants":
        maxima = dict(DEFAULT_MAXIMA)
        weights = {name: 1.0 / 6.0 for name in METRIC_NAMES}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            metric, _, kind = key.partition(".")
            if metric not in METRIC_NAMES or kind not in ("max", "weight"):
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            if kind == "max":
                maxima[metric] = float(value)
            else:
                weights[metric] = float(value)
        return cls(maxima=maxima, weights=weights)


@dataclass(frozen=True)
class PrecisionReport:
    """Raw distances, their normalized values, and the weighted mean."""

    raw: dict[str, float]
    normalized: dict[str, float]
    pre_mean: float


def normalize_and_aggregate(
    raw: dict[str, float], constants: NormalizationConstants | None = None
) -> PrecisionReport:
    """Normalize six raw distances to [0,1] (clipping at 1) and combine them."""
    k = constants if constants is not None else NormalizationConstants()
    normalized = {}
    for name in METRIC_NAMES:
        d = raw[name]
        if not math.isfinite(d) or d < 0.0:
            raise ValueError(f"raw distance {name}={d!r} must be finite and non-negative")
        normalized[name] = min(d / k.maxima[name], 1.0)
    pre_mean = sum(k.weights[name] * normalized[name] for name in METRIC_NAMES)
    return PrecisionReport(raw=dict(raw), normalized=normalized, pre_mean=pre_mean)


def scan_gamut_maxima(points: int = 17, chunk: int = 256) -> dict[str, float]:
    """Brute-force the sRGB-gamut maxima of the three Lab metrics.

    Sweeps a points^3 lattice of the 8-bit cube against itself; the stored
    DEFAULT_MAXIMA were produced by scan_gamut_maxima(17).
    """
    vals = np.round(np.linspace(0.0, 255.0, points))
    r, g, b = np.meshgrid(vals, vals, vals, indexing="ij")
    rgb = np.stack([r.ravel(), g.ravel(), b.ravel()], axis=1)
    labs = np.array([srgb_to_lab(tuple(row)) for row in rgb])
    n = labs.shape[0]
    max00 = maxch = maxhyab = 0.0
    for i in range(0, n, chunk):
        block = labs[i : i + chunk]
        l1 = np.repeat(block, n, axis=0)
        l2 = np.tile(labs, (block.shape[0], 1))
        max00 = max(max00, float(ciede2000(l1, l2).max()))
        dab = np.hypot(l1[:, 1] - l2[:, 1], l1[:, 2] - l2[:, 2])
        maxch = max(maxch, float(dab.max()))
        maxhyab = max(maxhyab, float(np.sqrt(dab ** 2 + np.abs(l1[:, 0] - l2[:, 0])).max()))
    return {"lab_00": max00, "lab_ch": maxch, "lab_hyab": maxhyab}
