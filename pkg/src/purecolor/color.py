"""Color types and conversions between sRGB, linear RGB, XYZ, CIELAB, LCh and HSL.

All conversions run in double precision; quantization to 8-bit happens only
when a color is encoded into an image or a hex string. The D65 / 2-degree
observer white point is used throughout (the sRGB reference conditions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import NamedTuple

__all__ = [
    "Rgb8",
    "Lab",
    "Lch",
    "Hsl",
    "ColorLevel",
    "HexError",
    "parse_hex",
    "format_hex",
    "srgb_to_linear",
    "srgb_to_xyz",
    "srgb_to_lab",
    "lab_to_lch",
    "rgb_to_hsl",
    "hsl_to_rgb",
    "centroid_table",
    "sample_color",
]


@dataclass(frozen=True)
class Rgb8:
    """An 8-bit sRGB color; channels are integers in 0..255."""

    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise ValueError(f"channel {name}={v!r} outside 0..255")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


class Lab(NamedTuple):
    """CIELAB value: L in 0..100 for sRGB inputs, a/b unbounded opponent axes."""

    L: float
    a: float
    b: float


class Lch(NamedTuple):
    """Cylindrical CIELAB: chroma C >= 0, hue h in degrees [0, 360)."""

    L: float
    C: float
    h: float


class Hsl(NamedTuple):
    """HSL value: hue in degrees [0, 360), saturation and lightness in [0, 1]."""

    h: float
    s: float
    l: float


class HexError(ValueError):
    """Raised for malformed hex color strings."""


_HEX_DIGITS = set("0123456789abcdefABCDEF")


def parse_hex(text: str) -> Rgb8:
    """Parse "#RRGGBB" (case-insensitive) into an Rgb8.

    Raises HexError with the offending position for anything that is not a
    '#' followed by exactly six hex digits.
    """
    if not isinstance(text, str):
        raise HexError(f"expected string, got {type(text).__name__}")
    if len(text) != 7:
        raise HexError(f"expected 7 characters '#RRGGBB', got {len(text)}: {text!r}")
    if text[0] != "#":
        raise HexError(f"missing '#' at position 0: {text!r}")
    for i, ch in enumerate(text[1:], start=1):
        if ch not in _HEX_DIGITS:
            raise HexError(f"non-hex digit {ch!r} at position {i}: {text!r}")
    return Rgb8(int(text[1:3], 16), int(text[3:5], 16), int(text[5:7], 16))


def format_hex(c: Rgb8) -> str:
    """Format a color as uppercase "#RRGGBB"."""
    return "#%02X%02X%02X" % (c.r, c.g, c.b)


# --- sRGB -> XYZ -> CIELAB -------------------------------------------------

# sRGB primaries under D65, 2-degree observer.
_M_RGB_TO_XYZ = (
    (0.4124564, 0.3575761, 0.1804375),
    (0.2126729, 0.7151522, 0.0721750),
    (0.0193339, 0.1191920, 0.9503041),
)
# White point taken as the matrix rows applied to (1,1,1) so that pure white
# lands exactly on L=100, a=b=0 and L never exceeds 100.
_WHITE_D65 = tuple(sum(row) for row in _M_RGB_TO_XYZ)

_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0


def srgb_to_linear(u: float) -> float:
    """IEC 61966-2-1 decoding of one channel, input in [0, 1]."""
    if u <= 0.04045:
        return u / 12.92
    return ((u + 0.055) / 1.055) ** 2.4


def srgb_to_xyz(c) -> tuple[float, float, float]:
    """Convert an sRGB color (Rgb8 or real-valued triple on the 0..255 scale) to XYZ."""
    r, g, b = _channels(c)
    rl = srgb_to_linear(r / 255.0)
    gl = srgb_to_linear(g / 255.0)
    bl = srgb_to_linear(b / 255.0)
    m = _M_RGB_TO_XYZ
    return (
        m[0][0] * rl + m[0][1] * gl + m[0][2] * bl,
        m[1][0] * rl + m[1][1] * gl + m[1][2] * bl,
        m[2][0] * rl + m[2][1] * gl + m[2][2] * bl,
    )


def _lab_f(t: float) -> float:
    if t > _LAB_EPS:
        return t ** (1.0 / 3.0)
    return (_LAB_KAPPA * t + 16.0) / 116.0


def srgb_to_lab(c) -> Lab:
    """Convert an sRGB color (Rgb8 or real triple on the 0..255 scale) to CIELAB."""
    x, y, z = srgb_to_xyz(c)
    fx = _lab_f(x / _WHITE_D65[0])
    fy = _lab_f(y / _WHITE_D65[1])
    fz = _lab_f(z / _WHITE_D65[2])
    return Lab(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def lab_to_lch(v: Lab) -> Lch:
    """Convert CIELAB to its cylindrical form; hue of near-achromatic values is 0."""
    L, a, b = v
    c = math.hypot(a, b)
    if c < 1e-6:
        return Lch(L, c, 0.0)
    h = math.degrees(math.atan2(b, a)) % 360.0
    return Lch(L, c, h)


# --- HSL --------------------------------------------------------------------


def rgb_to_hsl(c) -> Hsl:
    """Standard hexcone RGB -> HSL; achromatic inputs yield h=0, s=0.

    Accepts Rgb8 or a real-valued triple on the 0..255 scale, so the
    representative (mean) color of a region can be converted directly.
    """
    r, g, b = (v / 255.0 for v in _channels(c))
    mx = max(r, g, b)
    mn = min(r, g, b)
    l = (mx + mn) / 2.0
    d = mx - mn
    if d == 0.0:
        return Hsl(0.0, 0.0, l)
    s = d / (1.0 - abs(2.0 * l - 1.0))
    if mx == r:
        h = ((g - b) / d) % 6.0
    elif mx == g:
        h = (b - r) / d + 2.0
    else:
        h = (r - g) / d + 4.0
    return Hsl(60.0 * h, s, l)


def hsl_to_rgb(v: Hsl) -> Rgb8:
    """Standard hexcone HSL -> RGB, rounded to 8 bits.

    Exact inverse of rgb_to_hsl over the whole 8-bit cube (after rounding).
    """
    r, g, b = hsl_to_rgb_float(v)
    return Rgb8(int(round(r)), int(round(g)), int(round(b)))


def hsl_to_rgb_float(v: Hsl) -> tuple[float, float, float]:
    """HSL -> real-valued RGB on the 0..255 scale (no quantization)."""
    h, s, l = v
    c = (1.0 - abs(2.0 * l - 1.0)) * s
    hp = (h % 360.0) / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    if hp < 1.0:
        r1, g1, b1 = c, x, 0.0
    elif hp < 2.0:
        r1, g1, b1 = x, c, 0.0
    elif hp < 3.0:
        r1, g1, b1 = 0.0, c, x
    elif hp < 4.0:
        r1, g1, b1 = 0.0, x, c
    elif hp < 5.0:
        r1, g1, b1 = x, 0.0, c
    else:
        r1, g1, b1 = c, 0.0, x
    m = l - c / 2.0
    return (255.0 * (r1 + m), 255.0 * (g1 + m), 255.0 * (b1 + m))


def _channels(c):
    if isinstance(c, Rgb8):
        return (float(c.r), float(c.g), float(c.b))
    r, g, b = c
    return (float(r), float(g), float(b))


# --- named centroid tables ---------------------------------------------------


class ColorLevel(Enum):
    """Color-name granularity: 13 broad, 29 intermediate, 267 fine categories."""

    LEVEL_1 = 1
    LEVEL_2 = 2
    LEVEL_3 = 3


_LEVEL_SIZES = {ColorLevel.LEVEL_1: 13, ColorLevel.LEVEL_2: 29, ColorLevel.LEVEL_3: 267}

_tables: dict[ColorLevel, list[tuple[str, Rgb8]]] | None = None


def _load_tables() -> dict[ColorLevel, list[tuple[str, Rgb8]]]:
    global _tables
    if _tables is not None:
        return _tables
    text = resources.files("purecolor.data").joinpath("color_names.tsv").read_text("utf-8")
    tables: dict[ColorLevel, list[tuple[str, Rgb8]]] = {lv: [] for lv in ColorLevel}
    seen: set[tuple[int, str]] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"color table line {lineno}: expected 3 tab-separated fields")
        level_s, name, hexcode = parts
        key = (int(level_s), name)
        if key in seen:
            raise ValueError(f"color table line {lineno}: duplicate entry {key}")
        seen.add(key)
        tables[ColorLevel(int(level_s))].append((name, parse_hex(hexcode)))
    for lv, expected in _LEVEL_SIZES.items():
        if len(tables[lv]) != expected:
            raise ValueError(
                f"color table for {lv.name} has {len(tables[lv])} entries, expected {expected}"
            )
    _tables = tables
    return tables


def centroid_table(level: ColorLevel) -> list[tuple[str, Rgb8]]:
    """The (name, centroid) records for one granularity level, in file order."""
    return list(_load_tables()[level])


def sample_color(level: ColorLevel, rng) -> Rgb8:
    """Draw a centroid color uniformly at random from the level's table.

    `rng` is a numpy Generator; results are deterministic for a given state.
    """
    table = _load_tables()[level]
    return table[int(rng.integers(len(table)))][1]
