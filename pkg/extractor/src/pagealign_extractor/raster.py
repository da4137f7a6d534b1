"""Silhouette rasterization of interpreted page content.

Pages render onto a white canvas at a requested DPI: text runs become
filled black boxes sized from the font metrics estimate, strokes become
black lines at their device width, filled paths become black rectangles
over their bounding box. The result tracks the page's ink layout, not
its glyph shapes, which is what downstream visual comparison consumes.
"""
from __future__ import annotations

import cv2
import numpy as np

from .content import CHAR_WIDTH_RATIO, PageContent

# Glyph box extents relative to the baseline, as fractions of font size.
ASCENT_RATIO = 0.8
DESCENT_RATIO = 0.2


def render_page(content: PageContent,
                mediabox: tuple[float, float, float, float],
                dpi: int) -> np.ndarray:
    """Render to grayscale uint8; origin flips to image convention (top-left)."""
    x0, y0, x1, y1 = mediabox
    width_pt = x1 - x0
    height_pt = y1 - y0
    if width_pt <= 0 or height_pt <= 0 or dpi <= 0:
        raise ValueError(f"cannot render {width_pt}x{height_pt}pt at {dpi} dpi")
    scale = dpi / 72.0
    width = max(1, round(width_pt * scale))
    height = max(1, round(height_pt * scale))
    img = np.full((height, width), 255, dtype=np.uint8)

    def px(x: float, y: float) -> tuple[int, int]:
        return round((x - x0) * scale), round(height - (y - y0) * scale)

    for box in content.fills:
        cv2.rectangle(img, px(box.x0, box.y1), px(box.x1, box.y0), 0, -1)
    for s in content.strokes:
        thickness = max(1, round(s.width * scale))
        cv2.line(img, px(s.x0, s.y0), px(s.x1, s.y1), 0, thickness)
    for run in content.runs:
        top = run.y + ASCENT_RATIO * run.size
        bottom = run.y - DESCENT_RATIO * run.size
        right = run.x + CHAR_WIDTH_RATIO * run.size * len(run.text)
        cv2.rectangle(img, px(run.x, top), px(right, bottom), 0, -1)
    return img


def low_raster(content: PageContent,
               mediabox: tuple[float, float, float, float],
               dpi: int, size: tuple[int, int]) -> np.ndarray:
    """Low-resolution thumbnail: render at dpi, then resample to size.

    The two-step path keeps non-standard page shapes comparable: the
    coarse render fixes the ink density, the resample fixes the grid.
    """
    img = render_page(content, mediabox, dpi)
    return cv2.resize(img, size, interpolation=cv2.INTER_CUBIC)
