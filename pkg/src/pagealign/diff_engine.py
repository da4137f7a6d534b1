"""Per-pair change detection: text spans, table cells, visual regions.

Each matched page pair gets three independent diff layers. Text is compared
character-wise after truncation; tables pair up by position and compare
trimmed cells; rasters are compared pixel-wise with light morphological
cleanup before connected regions are boxed.
"""
from __future__ import annotations

import difflib
from dataclasses import dataclass

import cv2
import numpy as np

from .bundle import PageRecord, TableGrid

EXCERPT_LIMIT = 80


class RasterMissing(Exception):
    """visual_diff needs a raster on both sides."""


@dataclass
class DiffConfig:
    text_limit: int = 5000        # characters compared per side
    pixel_threshold: int = 32     # absolute gray delta that counts as changed
    morph_kernel: int = 3
    min_region_area: int = 25     # changed pixels a component must keep
    merge_margin: int = 5         # rectangles this close merge


@dataclass
class TextSpan:
    kind: str  # "Unchanged" | "Added" | "Deleted"
    old_range: tuple[int, int]
    new_range: tuple[int, int]
    excerpt: str


@dataclass
class TextDiff:
    spans: list[TextSpan]

    def changed_spans(self) -> int:
        return sum(1 for s in self.spans if s.kind != "Unchanged")


@dataclass
class CellChange:
    table_index: int
    row: int
    col: int
    old_value: str
    new_value: str


@dataclass
class TableDiff:
    changed_cells: list[CellChange]
    added_tables: list[int]
    removed_tables: list[int]


@dataclass
class VisualDiff:
    regions: list[tuple[int, int, int, int]]  # (x, y, w, h)
    changed_pixel_fraction: float


@dataclass
class PairDiff:
    old_index: int
    new_index: int
    text: TextDiff
    tables: TableDiff
    visual: VisualDiff | None = None


def text_diff(old_text: str, new_text: str, limit: int = 5000) -> TextDiff:
    """Character-level diff of the first `limit` characters of each side.

    Replacements come out as a Deleted span followed by an Added span, so
    concatenating old-side spans reconstructs the old text and new-side
    spans the new text.
    """
    a, b = old_text[:limit], new_text[:limit]
    matcher = difflib.SequenceMatcher(None, a, b, autojunk=False)
    spans: list[TextSpan] = []
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "equal":
            spans.append(TextSpan("Unchanged", (i1, i2), (j1, j2), a[i1:i2][:EXCERPT_LIMIT]))
        elif tag == "delete":
            spans.append(TextSpan("Deleted", (i1, i2), (j1, j1), a[i1:i2][:EXCERPT_LIMIT]))
        elif tag == "insert":
            spans.append(TextSpan("Added", (i1, i1), (j1, j2), b[j1:j2][:EXCERPT_LIMIT]))
        else:  # replace
            spans.append(TextSpan("Deleted", (i1, i2), (j1, j1), a[i1:i2][:EXCERPT_LIMIT]))
            spans.append(TextSpan("Added", (i2, i2), (j1, j2), b[j1:j2][:EXCERPT_LIMIT]))
    return TextDiff(spans=spans)


def table_diff(old_tables: list[TableGrid], new_tables: list[TableGrid]) -> TableDiff:
    """Compare tables pairwise by position; cells compare trimmed.

    A cell missing on one side (shorter row or fewer rows) compares as "".
    Surplus tables land in added_tables / removed_tables by index.
    """
    changed: list[CellChange] = []
    for t in range(min(len(old_tables), len(new_tables))):
        old_rows, new_rows = old_tables[t].rows, new_tables[t].rows
        for r in range(max(len(old_rows), len(new_rows))):
            orow = old_rows[r] if r < len(old_rows) else []
            nrow = new_rows[r] if r < len(new_rows) else []
            for c in range(max(len(orow), len(nrow))):
                ov = orow[c].strip() if c < len(orow) else ""
                nv = nrow[c].strip() if c < len(nrow) else ""
                if ov != nv:
                    changed.append(CellChange(t, r, c, ov, nv))
    return TableDiff(
        changed_cells=changed,
        added_tables=list(range(len(old_tables), len(new_tables))),
        removed_tables=list(range(len(new_tables), len(old_tables))),
    )


def _as_gray(img: np.ndarray) -> np.ndarray:
    if img.ndim == 3:
        return cv2.cvtColor(img, cv2.COLOR_BGR2GRAY)
    return img


def _rects_touch(a: tuple[int, int, int, int], b: tuple[int, int, int, int],
                 margin: int) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return not (ax + aw + margin <= bx - margin or bx + bw + margin <= ax - margin
                or ay + ah + margin <= by - margin or by + bh + margin <= ay - margin)


def _merge_rects(rects: list[tuple[int, int, int, int]],
                 margin: int) -> list[tuple[int, int, int, int]]:
    rects = list(rects)
    merged = True
    while merged:
        merged = False
        out: list[tuple[int, int, int, int]] = []
        for rect in rects:
            for k, kept in enumerate(out):
                if _rects_touch(rect, kept, margin):
                    x = min(rect[0], kept[0])
                    y = min(rect[1], kept[1])
                    x2 = max(rect[0] + rect[2], kept[0] + kept[2])
                    y2 = max(rect[1] + rect[3], kept[1] + kept[3])
                    out[k] = (x, y, x2 - x, y2 - y)
                    merged = True
                    break
            else:
                out.append(rect)
        rects = out
    return sorted(rects, key=lambda r: (r[1], r[0]))


def visual_diff(old_raster: np.ndarray | None, new_raster: np.ndarray | None,
                cfg: DiffConfig | None = None) -> VisualDiff:
    """Box the visually changed areas between two page renders.

    Pixels whose absolute gray difference exceeds the threshold form a
    change mask; changed_pixel_fraction is measured on that raw mask. One
    dilation and one erosion bridge hairline gaps, then 8-connected
    components below the area floor are discarded and nearby boxes merge.
    The smaller raster is scaled up to the larger one's size first.
    """
    if old_raster is None or new_raster is None:
        raise RasterMissing("visual diff requires rasters on both sides")
    cfg = cfg or DiffConfig()
    a, b = _as_gray(old_raster), _as_gray(new_raster)
    height = max(a.shape[0], b.shape[0])
    width = max(a.shape[1], b.shape[1])
    if a.shape != (height, width):
        a = cv2.resize(a, (width, height), interpolation=cv2.INTER_LINEAR)
    if b.shape != (height, width):
        b = cv2.resize(b, (width, height), interpolation=cv2.INTER_LINEAR)

    mask = (cv2.absdiff(a, b) > cfg.pixel_threshold).astype(np.uint8)
    fraction = float(mask.sum()) / mask.size

    kernel = np.ones((cfg.morph_kernel, cfg.morph_kernel), np.uint8)
    cleaned = cv2.erode(cv2.dilate(mask, kernel), kernel)
    count, _, stats, _ = cv2.connectedComponentsWithStats(cleaned, connectivity=8)
    rects = [(int(stats[k, cv2.CC_STAT_LEFT]), int(stats[k, cv2.CC_STAT_TOP]),
              int(stats[k, cv2.CC_STAT_WIDTH]), int(stats[k, cv2.CC_STAT_HEIGHT]))
             for k in range(1, count)
             if stats[k, cv2.CC_STAT_AREA] >= cfg.min_region_area]
    return VisualDiff(regions=_merge_rects(rects, cfg.merge_margin),
                      changed_pixel_fraction=fraction)


def diff_pair(old_page: PageRecord, new_page: PageRecord,
              cfg: DiffConfig | None = None) -> PairDiff:
    """All three diff layers for one matched pair.

    The visual layer is skipped (None) when either side lacks a high-res
    raster; text and tables always run.
    """
    cfg = cfg or DiffConfig()
    visual = None
    if old_page.raster_high is not None and new_page.raster_high is not None:
        visual = visual_diff(old_page.raster_high, new_page.raster_high, cfg)
    return PairDiff(
        old_index=old_page.index,
        new_index=new_page.index,
        text=text_diff(old_page.text, new_page.text, cfg.text_limit),
        tables=table_diff(old_page.tables, new_page.tables),
        visual=visual,
    )
