from __future__ import annotations

import numpy as np
import pytest

from helpers import make_page, make_table
from pagealign.diff_engine import (
    DiffConfig,
    RasterMissing,
    diff_pair,
    table_diff,
    text_diff,
    visual_diff,
)


class TestTextDiff:
    def test_identical_single_unchanged(self):
        diff = text_diff("same text", "same text")
        assert [s.kind for s in diff.spans] == ["Unchanged"]
        assert diff.changed_spans() == 0

    def test_insert_only(self):
        diff = text_diff("", "abc")
        assert [s.kind for s in diff.spans] == ["Added"]
        assert diff.spans[0].new_range == (0, 3)
        assert diff.spans[0].excerpt == "abc"

    def test_delete_only(self):
        diff = text_diff("abc", "")
        assert [s.kind for s in diff.spans] == ["Deleted"]

    def test_replace_splits_into_delete_and_add(self):
        diff = text_diff("load 10kN", "load 20kN")
        kinds = [s.kind for s in diff.spans]
        assert "Deleted" in kinds and "Added" in kinds
        deleted = next(s for s in diff.spans if s.kind == "Deleted")
        added = next(s for s in diff.spans if s.kind == "Added")
        assert deleted.excerpt == "1"
        assert added.excerpt == "2"

    def test_span_ranges_reconstruct_both_sides(self):
        a, b = "alpha beta gamma", "alpha delta gamma x"
        diff = text_diff(a, b)
        assert "".join(a[s.old_range[0]:s.old_range[1]] for s in diff.spans
                       if s.kind != "Added") == a
        assert "".join(b[s.new_range[0]:s.new_range[1]] for s in diff.spans
                       if s.kind != "Deleted") == b

    def test_truncation_limit(self):
        a = "x" * 6000
        b = "x" * 6000 + "y"
        diff = text_diff(a, b, limit=5000)
        # Both sides clipped to 5000 chars: identical after truncation.
        assert [s.kind for s in diff.spans] == ["Unchanged"]
        assert diff.spans[0].old_range == (0, 5000)

    def test_excerpt_capped_at_80(self):
        diff = text_diff("", "z" * 500)
        assert len(diff.spans[0].excerpt) == 80

    def test_both_empty(self):
        assert text_diff("", "").spans == []


class TestTableDiff:
    def test_identical(self):
        t = make_table([["a", "b"], ["c", "d"]])
        diff = table_diff([t], [t])
        assert diff.changed_cells == []
        assert diff.added_tables == [] and diff.removed_tables == []

    def test_single_cell_change(self):
        old = make_table([["a", "b"], ["c", "d"]])
        new = make_table([["a", "b"], ["c", "e"]])
        diff = table_diff([old], [new])
        assert len(diff.changed_cells) == 1
        cell = diff.changed_cells[0]
        assert (cell.table_index, cell.row, cell.col) == (0, 1, 1)
        assert cell.old_value == "d" and cell.new_value == "e"

    def test_cells_compare_trimmed(self):
        old = make_table([[" a ", "b"]])
        new = make_table([["a", "b "]])
        assert table_diff([old], [new]).changed_cells == []

    def test_missing_row_compares_as_empty(self):
        old = make_table([["a"], ["b"]])
        new = make_table([["a"]])
        diff = table_diff([old], [new])
        assert len(diff.changed_cells) == 1
        assert diff.changed_cells[0].old_value == "b"
        assert diff.changed_cells[0].new_value == ""

    def test_ragged_rows(self):
        old = make_table([["a", "b", "c"]])
        new = make_table([["a", "b"]])
        diff = table_diff([old], [new])
        assert [(c.row, c.col) for c in diff.changed_cells] == [(0, 2)]

    def test_added_and_removed_tables(self):
        t = make_table([["x"]])
        diff = table_diff([t, t], [t])
        assert diff.removed_tables == [1]
        assert diff.added_tables == []
        diff = table_diff([t], [t, t, t])
        assert diff.added_tables == [1, 2]


def blank_canvas(h: int = 100, w: int = 120, value: int = 255) -> np.ndarray:
    return np.full((h, w), value, np.uint8)


class TestVisualDiff:
    def test_identical_silent(self):
        img = blank_canvas()
        diff = visual_diff(img, img.copy())
        assert diff.regions == []
        assert diff.changed_pixel_fraction == 0.0

    def test_single_block_change(self):
        a = blank_canvas()
        b = blank_canvas()
        b[20:40, 30:60] = 0
        diff = visual_diff(a, b)
        assert len(diff.regions) == 1
        x, y, w, h = diff.regions[0]
        assert (x, y) == (30, 20)
        assert (w, h) == (30, 20)
        assert diff.changed_pixel_fraction == pytest.approx((20 * 30) / (100 * 120))

    def test_small_speck_filtered(self):
        a = blank_canvas()
        b = blank_canvas()
        b[10:13, 10:13] = 0  # 9 px survives closing but not the 25 px floor
        diff = visual_diff(a, b)
        assert diff.regions == []
        assert diff.changed_pixel_fraction > 0.0

    def test_sub_threshold_delta_ignored(self):
        a = blank_canvas(value=100)
        b = blank_canvas(value=130)  # delta 30 <= 32 threshold
        diff = visual_diff(a, b)
        assert diff.regions == [] and diff.changed_pixel_fraction == 0.0

    def test_nearby_regions_merge(self):
        a = blank_canvas()
        b = blank_canvas()
        b[10:30, 10:30] = 0
        b[10:30, 36:56] = 0  # 6 px gap: bridged by the 5 px merge margin
        diff = visual_diff(a, b)
        assert len(diff.regions) == 1
        x, y, w, h = diff.regions[0]
        assert x == 10 and x + w == 56

    def test_distant_regions_stay_separate(self):
        a = blank_canvas()
        b = blank_canvas()
        b[10:30, 10:30] = 0
        b[60:80, 80:100] = 0
        diff = visual_diff(a, b)
        assert len(diff.regions) == 2

    def test_region_count_symmetric(self):
        a = blank_canvas()
        b = blank_canvas()
        b[15:45, 20:50] = 0
        assert len(visual_diff(a, b).regions) == len(visual_diff(b, a).regions)

    def test_size_mismatch_scales_smaller_side(self):
        a = blank_canvas(50, 60)
        b = blank_canvas(100, 120)
        diff = visual_diff(a, b)
        assert diff.regions == []

    def test_color_input_accepted(self):
        a = np.full((40, 40, 3), 255, np.uint8)
        b = a.copy()
        b[5:35, 5:35] = (0, 0, 0)
        assert len(visual_diff(a, b).regions) == 1

    def test_missing_raster_raises(self):
        with pytest.raises(RasterMissing):
            visual_diff(None, blank_canvas())
        with pytest.raises(RasterMissing):
            visual_diff(blank_canvas(), None)

    def test_every_surviving_pixel_inside_a_region(self):
        rng = np.random.default_rng(7)
        a = (rng.random((80, 80)) * 255).astype(np.uint8)
        b = a.copy()
        b[12:40, 12:40] = 255 - b[12:40, 12:40]
        cfg = DiffConfig()
        diff = visual_diff(a, b, cfg)
        import cv2
        mask = (cv2.absdiff(a, b) > cfg.pixel_threshold).astype(np.uint8)
        kernel = np.ones((3, 3), np.uint8)
        cleaned = cv2.erode(cv2.dilate(mask, kernel), kernel)
        count, _, stats, _ = cv2.connectedComponentsWithStats(cleaned, connectivity=8)
        ys, xs = np.nonzero(cleaned)
        surviving = [
            (x, y) for x, y in zip(xs, ys)
            if any(stats[k, cv2.CC_STAT_AREA] >= cfg.min_region_area
                   and stats[k, cv2.CC_STAT_LEFT] <= x < stats[k, cv2.CC_STAT_LEFT]
                   + stats[k, cv2.CC_STAT_WIDTH]
                   and stats[k, cv2.CC_STAT_TOP] <= y < stats[k, cv2.CC_STAT_TOP]
                   + stats[k, cv2.CC_STAT_HEIGHT]
                   for k in range(1, count))
        ]
        for x, y in surviving:
            assert any(rx <= x < rx + rw and ry <= y < ry + rh
                       for rx, ry, rw, rh in diff.regions)


class TestDiffPair:
    def test_identity_silence(self):
        raster = np.full((64, 48), 220, np.uint8)
        page = make_page(0, "page body text", tables=[make_table([["a"]])],
                         raster_high=raster)
        diff = diff_pair(page, page)
        assert diff.text.changed_spans() == 0
        assert diff.tables.changed_cells == []
        assert diff.visual is not None
        assert diff.visual.regions == []
        assert diff.visual.changed_pixel_fraction == 0.0

    def test_visual_layer_skipped_without_rasters(self):
        diff = diff_pair(make_page(0, "a"), make_page(1, "b"))
        assert diff.visual is None
        assert diff.text.changed_spans() > 0

    def test_indices_recorded(self):
        diff = diff_pair(make_page(3, "x"), make_page(7, "x"))
        assert (diff.old_index, diff.new_index) == (3, 7)
