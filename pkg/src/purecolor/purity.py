"""Reference-free uniformity metrics: channel spread, edge density, high-frequency energy.

All three scores are exactly 0 on a constant region. Edge detection and the
spectral ratio operate on Rec.601 luma; computations stay in float64 and use
reflect padding so image borders do not manufacture edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

__all__ = [
    "PURITY_NAMES",
    "CannyParams",
    "PurityNorm",
    "PurityReport",
    "luma",
    "channel_stddev",
    "canny_edge_density",
    "canny_edges",
    "high_freq_ratio",
    "purity_aggregate",
]

PURITY_NAMES = ("sd", "ced", "hf")

_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

# Much larger than FFT round-off on a constant field, far below any real signal.
_SPECTRUM_FLOOR = 1e-12


@dataclass(frozen=True)
class CannyParams:
    """Gaussian blur and hysteresis settings for the edge detector.

    Thresholds apply to the gradient magnitude rescaled to the 0..255 range,
    which keeps them meaningful regardless of absolute contrast.
    """

    sigma: float = 1.4
    kernel_size: int = 5
    low: float = 50.0
    high: float = 150.0

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        if self.kernel_size % 2 != 1 or self.kernel_size < 3:
            raise ValueError("kernel_size must be an odd integer >= 3")
        if not 0.0 <= self.low < self.high:
            raise ValueError("thresholds must satisfy 0 <= low < high")


def luma(image: np.ndarray) -> np.ndarray:
    """Rec.601 luma of an (H, W, 3) image, as float64."""
    return image.astype(np.float64) @ _LUMA_WEIGHTS


def _region(image: np.ndarray, rect) -> np.ndarray:
    x0, y0, x1, y1 = rect
    h, w = image.shape[:2]
    if not (0 <= x0 < x1 <= w and 0 <= y0 < y1 <= h):
        raise ValueError(f"empty or out-of-bounds region {rect} for image {w}x{h}")
    return image[y0:y1, x0:x1]


def channel_stddev(image: np.ndarray, rect=None) -> float:
    """Spatial spread of the region pooled across channels.

    Population standard deviation of each channel over the region's pixels,
    combined as the RMS of the three values; equivalently the population
    deviation of all 3N samples after centering each channel on its own
    mean. Exactly 0 for any constant color, 127.5 at most for 8-bit data.
    """
    if rect is None:
        rect = (0, 0, image.shape[1], image.shape[0])
    block = _region(image, rect)
    per_channel_var = block.reshape(-1, block.shape[-1]).var(axis=0, dtype=np.float64)
    return float(math.sqrt(per_channel_var.mean()))


def _gaussian_kernel_1d(sigma: float, size: int) -> np.ndarray:
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


# the 2D Gaussian and Sobel kernels factor into these 1-D passes
_SOBEL_DERIV = np.array([-1.0, 0.0, 1.0])
_SOBEL_SMOOTH = np.array([1.0, 2.0, 1.0])


def canny_edges(image: np.ndarray, rect=None, params: CannyParams | None = None) -> np.ndarray:
    """Boolean edge map of a region: blur, Sobel, non-maximum suppression, hysteresis."""
    p = params if params is not None else CannyParams()
    if rect is None:
        rect = (0, 0, image.shape[1], image.shape[0])
    block = _region(image, rect)
    h, w = block.shape[:2]
    if h < max(5, p.kernel_size) or w < max(5, p.kernel_size):
        raise ValueError(f"region {w}x{h} too small for edge detection")

    gray = luma(block) if block.ndim == 3 else block.astype(np.float64)
    g1 = _gaussian_kernel_1d(p.sigma, p.kernel_size)
    smooth = ndimage.correlate1d(gray, g1, axis=0, mode="reflect")
    smooth = ndimage.correlate1d(smooth, g1, axis=1, mode="reflect")
    dx = ndimage.correlate1d(
        ndimage.correlate1d(smooth, _SOBEL_SMOOTH, axis=0, mode="reflect"),
        _SOBEL_DERIV, axis=1, mode="reflect",
    )
    dy = ndimage.correlate1d(
        ndimage.correlate1d(smooth, _SOBEL_SMOOTH, axis=1, mode="reflect"),
        _SOBEL_DERIV, axis=0, mode="reflect",
    )
    mag = np.hypot(dx, dy)
    peak = mag.max()
    # convolution round-off on a flat field leaves ~1e-14 residue, not signal
    if peak <= 1e-6:
        return np.zeros((h, w), dtype=bool)
    # round away float asymmetries so ties resolve identically for an image
    # and its luma inverse
    mag = np.round(mag * (255.0 / peak), 6)

    # non-maximum suppression along the quantized gradient direction
    angle = np.degrees(np.arctan2(dy, dx)) % 180.0
    padded = np.pad(mag, 1, mode="edge")

    def shifted(di, dj):
        return padded[1 + di : 1 + di + h, 1 + dj : 1 + dj + w]

    sector0 = (angle < 22.5) | (angle >= 157.5)
    sector1 = (angle >= 22.5) & (angle < 67.5)
    sector2 = (angle >= 67.5) & (angle < 112.5)
    sector3 = (angle >= 112.5) & (angle < 157.5)
    n1 = np.empty_like(mag)
    n2 = np.empty_like(mag)
    for mask, (d1, d2) in (
        (sector0, ((0, 1), (0, -1))),
        (sector1, ((1, -1), (-1, 1))),
        (sector2, ((1, 0), (-1, 0))),
        (sector3, ((-1, -1), (1, 1))),
    ):
        n1[mask] = shifted(*d1)[mask]
        n2[mask] = shifted(*d2)[mask]
    suppressed = np.where((mag >= n1) & (mag >= n2), mag, 0.0)

    strong = suppressed >= p.high
    weak = suppressed >= p.low
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        return np.zeros((h, w), dtype=bool)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels]


def canny_edge_density(image: np.ndarray, rect=None, params: CannyParams | None = None) -> float:
    """Fraction of region pixels classified as edges, in [0, 1]."""
    edges = canny_edges(image, rect, params)
    return float(edges.sum()) / edges.size


def high_freq_ratio(image: np.ndarray, rect=None, cutoff_fraction: float = 0.25) -> float:
    """Share of non-DC spectral energy beyond a normalized radius, in [0, 1].

    The region's luma is transformed with a 2D FFT; radii are measured from
    the centered spectrum and normalized by the half-diagonal so the extreme
    corner frequency sits at radius 1. The DC bin is excluded from both the
    numerator and the denominator; a constant region is defined as 0.
    """
    if not 0.0 < cutoff_fraction < 1.0:
        raise ValueError("cutoff_fraction must lie in (0, 1)")
    if rect is None:
        rect = (0, 0, image.shape[1], image.shape[0])
    block = _region(image, rect)
    h, w = block.shape[:2]
    if h < 8 or w < 8:
        raise ValueError(f"region {w}x{h} too small for a spectral ratio (need 8x8)")

    gray = luma(block) if block.ndim == 3 else block.astype(np.float64)
    spectrum = np.abs(np.fft.fft2(gray)) ** 2
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    radius = np.sqrt(fx ** 2 + fy ** 2) / math.sqrt(0.5)  # half-diagonal of (0.5, 0.5)

    total_all = spectrum.sum()
    dc = spectrum[0, 0]
    total = total_all - dc
    if total <= _SPECTRUM_FLOOR * max(total_all, 1.0):
        return 0.0
    high = spectrum[radius > cutoff_fraction].sum()
    return float(high / total)


@dataclass(frozen=True)
class PurityNorm:
    """Divisor for the spread metric plus the three aggregation weights."""

    sd_max: float = 127.5
    weights: dict[str, float] = field(
        default_factory=lambda: {name: 1.0 / 3.0 for name in PURITY_NAMES}
    )

    def __post_init__(self):
        if not self.sd_max > 0.0:
            raise ValueError("sd_max must be positive")
        for name in PURITY_NAMES:
            if name not in self.weights:
                raise ValueError(f"missing weight for {name!r}")
            if self.weights[name] < 0.0:
                raise ValueError(f"weight for {name!r} must be non-negative")
        total = sum(self.weights[name] for name in PURITY_NAMES)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1")


@dataclass(frozen=True)
class PurityReport:
    """Raw uniformity values, their normalized forms, and the weighted mean."""

    raw: dict[str, float]
    normalized: dict[str, float]
    pur_mean: float


def purity_aggregate(raw: dict[str, float], norm: PurityNorm | None = None) -> PurityReport:
    """Normalize (sd by its maximum; ced/hf are already ratios) and combine."""
    k = norm if norm is not None else PurityNorm()
    for name in PURITY_NAMES:
        v = raw[name]
        if not math.isfinite(v) or v < 0.0:
            raise ValueError(f"purity value {name}={v!r} must be finite and non-negative")
    for name in ("ced", "hf"):
        if raw[name] > 1.0:
            raise ValueError(f"{name} is a ratio and must not exceed 1, got {raw[name]!r}")
    normalized = {
        "sd": min(raw["sd"] / k.sd_max, 1.0),
        "ced": raw["ced"],
        "hf": raw["hf"],
    }
    pur_mean = sum(k.weights[name] * normalized[name] for name in PURITY_NAMES)
    return PurityReport(raw=dict(raw), normalized=normalized, pur_mean=pur_mean)
