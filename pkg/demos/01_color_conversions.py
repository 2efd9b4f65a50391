"""
Color spaces in the toolkit
===========================

Parse hex colors, convert between sRGB / CIELAB / LCh / HSL, and draw
named centroid colors at the three granularity levels.
"""

import numpy as np

from purecolor.color import (
    ColorLevel,
    centroid_table,
    format_hex,
    hsl_to_rgb,
    lab_to_lch,
    parse_hex,
    rgb_to_hsl,
    sample_color,
    srgb_to_lab,
)

# hex parsing round-trips exactly
c = parse_hex("#9966CC")
print("parsed:", c, "->", format_hex(c))

# CIELAB under D65/2deg: white is (100, 0, 0), black is (0, 0, 0)
for name, color in [("white", "#FFFFFF"), ("black", "#000000"), ("red", "#FF0000")]:
    lab = srgb_to_lab(parse_hex(color))
    print(f"{name:>6}: L={lab.L:7.3f}  a={lab.a:8.3f}  b={lab.b:8.3f}")

# the cylindrical form separates chroma from hue angle
lab = srgb_to_lab(c)
lch = lab_to_lch(lab)
print(f"#9966CC -> L={lch.L:.2f} C={lch.C:.2f} h={lch.h:.1f} deg")

# HSL is exact over the whole 8-bit cube (after rounding)
hsl = rgb_to_hsl(c)
print("HSL:", tuple(round(v, 4) for v in hsl), "->", hsl_to_rgb(hsl))

# named centroids: 13 broad, 29 intermediate, 267 fine categories
for level in ColorLevel:
    table = centroid_table(level)
    print(f"{level.name}: {len(table)} categories, e.g.", table[0][0], format_hex(table[0][1]))

# seeded sampling is reproducible
rng = np.random.default_rng(7)
draws = [format_hex(sample_color(ColorLevel.LEVEL_2, rng)) for _ in range(5)]
print("five level-2 draws with seed 7:", draws)
