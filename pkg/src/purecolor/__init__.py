"""Pure-color benchmark toolkit: dataset synthesis, color metrics, evaluation harness."""

from purecolor.color import (
    ColorLevel,
    Hsl,
    Lab,
    Lch,
    Rgb8,
    format_hex,
    hsl_to_rgb,
    lab_to_lch,
    parse_hex,
    rgb_to_hsl,
    sample_color,
    srgb_to_lab,
)

__version__ = "0.1.0"
