"""Interpreter tests against hand-written content streams."""
from __future__ import annotations

import pytest

from pagealign_extractor.content import interpret, page_text
from pagealign_extractor.errors import PdfReadError


class TestTextOperators:
    def test_drawstring_form(self):
        out = interpret(b"BT /F1 12 Tf 1 0 0 1 72 760 Tm (Overview) Tj ET")
        assert len(out.runs) == 1
        run = out.runs[0]
        assert (run.x, run.y) == (72.0, 760.0)
        assert run.size == 12.0
        assert run.text == "Overview"

    def test_td_positions_relative_to_line_start(self):
        out = interpret(b"BT /F1 10 Tf 50 700 Td (a) Tj 0 -20 Td (b) Tj ET")
        assert [(r.text, r.x, r.y) for r in out.runs] == [
            ("a", 50.0, 700.0),
            ("b", 50.0, 680.0),
        ]

    def test_leading_drives_tstar_and_quote(self):
        out = interpret(
            b"BT /F1 10 Tf 14 TL 1 0 0 1 10 100 Tm (one) Tj T* (two) Tj (three) ' ET"
        )
        assert [(r.text, r.y) for r in out.runs] == [
            ("one", 100.0), ("two", 86.0), ("three", 72.0),
        ]

    def test_TD_sets_leading(self):
        out = interpret(b"BT /F1 10 Tf 10 100 Td (a) Tj 0 -25 TD (b) Tj (c) ' ET")
        ys = [r.y for r in out.runs]
        assert ys == [100.0, 75.0, 50.0]

    def test_ctm_translates_text(self):
        out = interpret(
            b"q 1 0 0 1 72 650 cm BT /F1 9 Tf 1 0 0 1 6 22.8 Tm (cell) Tj ET Q"
        )
        run = out.runs[0]
        assert (run.x, run.y) == pytest.approx((78.0, 672.8))
        assert run.size == 9.0

    def test_ctm_scaling_scales_font_size(self):
        out = interpret(b"q 2 0 0 2 0 0 cm BT /F1 10 Tf 5 5 Td (big) Tj ET Q")
        run = out.runs[0]
        assert (run.x, run.y) == (10.0, 10.0)
        assert run.size == 20.0

    def test_tj_array_kern_gap_becomes_space(self):
        out = interpret(b"BT /F1 10 Tf 0 0 Td [(Hello) -250 (world)] TJ ET")
        assert out.runs[0].text == "Hello world"

    def test_tj_array_small_kern_joins(self):
        out = interpret(b"BT /F1 10 Tf 0 0 Td [(Hel) -40 (lo)] TJ ET")
        assert out.runs[0].text == "Hello"

    def test_consecutive_tj_advances_x(self):
        out = interpret(b"BT /F1 10 Tf 0 0 Td (abcd) Tj (ef) Tj ET")
        first, second = out.runs
        assert first.x == 0.0
        # four characters at the width estimate: 4 * 0.5 * 10
        assert second.x == 20.0

    def test_whitespace_only_string_not_recorded(self):
        out = interpret(b"BT /F1 10 Tf 0 0 Td (   ) Tj ET")
        assert out.runs == []

    def test_hex_string_operand(self):
        out = interpret(b"BT /F1 10 Tf 0 0 Td <4869> Tj ET")
        assert out.runs[0].text == "Hi"

    def test_tj_without_string_raises(self):
        with pytest.raises(PdfReadError):
            interpret(b"BT /F1 10 Tf Tj ET")


class TestPathOperators:
    def test_line_stroke(self):
        out = interpret(b"2 w n 100 100 m 300 300 l S")
        assert len(out.strokes) == 1
        s = out.strokes[0]
        assert (s.x0, s.y0, s.x1, s.y1) == (100.0, 100.0, 300.0, 300.0)
        assert s.width == 2.0

    def test_rect_stroke_emits_four_segments(self):
        out = interpret(b"n 150 400 120 60 re S")
        assert len(out.strokes) == 4
        xs = sorted({s.x0 for s in out.strokes} | {s.x1 for s in out.strokes})
        ys = sorted({s.y0 for s in out.strokes} | {s.y1 for s in out.strokes})
        assert xs == [150.0, 270.0]
        assert ys == [400.0, 460.0]

    def test_ctm_scales_stroke_width(self):
        out = interpret(b"q 2 0 0 2 0 0 cm 3 w 0 0 m 10 0 l S Q")
        s = out.strokes[0]
        assert (s.x1, s.y1) == (20.0, 0.0)
        assert s.width == 6.0

    def test_q_restores_line_width(self):
        out = interpret(b"q 5 w Q 0 0 m 10 0 l S")
        assert out.strokes[0].width == 1.0

    def test_fill_records_bounding_box(self):
        out = interpret(b"10 20 m 40 20 l 40 50 l 10 50 l f")
        assert len(out.fills) == 1
        box = out.fills[0]
        assert (box.x0, box.y0, box.x1, box.y1) == (10.0, 20.0, 40.0, 50.0)

    def test_n_discards_path(self):
        out = interpret(b"0 0 m 10 10 l n 5 5 m 6 6 l S")
        assert len(out.strokes) == 1
        assert out.strokes[0].x0 == 5.0

    def test_close_path_via_h(self):
        out = interpret(b"0 0 m 10 0 l 10 10 l h S")
        assert len(out.strokes) == 3

    def test_bezier_flattens_to_endpoint(self):
        out = interpret(b"0 0 m 1 1 2 2 30 40 c S")
        s = out.strokes[0]
        assert (s.x1, s.y1) == (30.0, 40.0)

    def test_color_and_style_ops_are_inert(self):
        out = interpret(
            b"0 0 0 rg 1 0 0 RG 1 J 1 j 0.5 g 0.1 0.2 0.3 0.4 k /GS1 gs "
            b"BT /F1 10 Tf 0 0 Td (x) Tj ET"
        )
        assert [r.text for r in out.runs] == ["x"]
        assert out.strokes == [] and out.fills == []


class TestPageText:
    def test_lines_ordered_top_to_bottom(self):
        out = interpret(
            b"BT /F1 12 Tf 1 0 0 1 72 700 Tm (lower) Tj "
            b"1 0 0 1 72 760 Tm (upper) Tj ET"
        )
        assert page_text(out.runs) == "upper\nlower"

    def test_runs_on_one_line_sort_by_x(self):
        out = interpret(
            b"BT /F1 9 Tf 1 0 0 1 86 100 Tm (right) Tj "
            b"1 0 0 1 6 100 Tm (left) Tj ET"
        )
        assert page_text(out.runs) == "left right"

    def test_baseline_jitter_groups_into_one_line(self):
        out = interpret(
            b"BT /F1 9 Tf 1 0 0 1 50 100.6 Tm (a) Tj "
            b"1 0 0 1 10 100 Tm (b) Tj ET"
        )
        assert page_text(out.runs) == "b a"

    def test_empty_page(self):
        assert page_text([]) == ""
