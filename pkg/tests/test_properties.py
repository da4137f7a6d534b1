"""Randomized invariant checks over the whole pipeline.

Four suites, each run at 1000 examples: fingerprint normalization and hash
invariants, block-decomposition partitioning, end-to-end match one-to-one
and page-partition guarantees, and diff silence/reconstruction.
"""
from __future__ import annotations

import re

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from helpers import make_bundle, make_page, make_table
from pagealign.consensus import compare_bundles
from pagealign.diff_engine import table_diff, text_diff, visual_diff
from pagealign.fingerprint import (
    MIN_HASH_CHARS,
    _FOLD,
    compute_phash,
    content_hash,
    extract_drawing_number,
    extract_section_title,
    normalize_text,
    phash_similarity,
)
from pagealign.lcs_align import equal_pairs, replace_regions, sequence_blocks

SUITE = settings(max_examples=1000, deadline=None, derandomize=True,
                 suppress_health_check=[HealthCheck.too_slow,
                                        HealthCheck.filter_too_much,
                                        HealthCheck.data_too_large])

DRAWING_SHAPE = re.compile(r"[A-Z]{1,3}-?[0-9]{1,3}[A-Z0-9]?")

texts = st.text(max_size=240)
rasters = hnp.arrays(np.uint8, (32, 32), elements=st.integers(0, 255))


@SUITE
@given(text=texts, raster=rasters)
def test_fingerprint_invariants_hold(text, raster):
    norm = normalize_text(text)
    assert normalize_text(norm) == norm
    assert norm == norm.strip()
    assert "  " not in norm
    assert not re.search(r"[^\S ]", norm)  # only plain spaces survive
    assert norm == norm.lower()

    digest = content_hash(make_page(0, text))
    assert digest == content_hash(make_page(3, text))  # index-independent
    if len(norm) >= MIN_HASH_CHARS:
        assert re.fullmatch(r"[0-9a-f]{32}", digest)
        padded = make_page(0, " \t" + text + "　\n")
        assert content_hash(padded) == digest
    else:
        assert digest == ""

    title = extract_section_title(text)
    assert title == "" or 4 <= len(title) <= 80

    drawing = extract_drawing_number(text)
    assert drawing == "" or DRAWING_SHAPE.fullmatch(drawing)
    assert extract_drawing_number(text.translate(_FOLD)) == drawing

    value = compute_phash(raster)
    assert 0 <= value < (1 << 63)  # bit 63 never set
    assert compute_phash(raster) == value
    assert phash_similarity(value, value) == 1.0
    assert 0.0 <= phash_similarity(value, 0) <= 1.0


hash_lists = st.lists(st.sampled_from(["", "h1", "h2", "h3", "h4"]), max_size=12)


def assert_tiles(intervals, length):
    pos = 0
    for lo, hi in intervals:
        assert lo == pos and hi >= lo
        pos = hi
    assert pos == length


@SUITE
@given(old=hash_lists, new=hash_lists)
def test_block_partition_reconstructs_documents(old, new):
    blocks = sequence_blocks(old, new)
    assert_tiles([b.old_range for b in blocks], len(old))
    assert_tiles([b.new_range for b in blocks], len(new))

    for b in blocks:
        ow = b.old_range[1] - b.old_range[0]
        nw = b.new_range[1] - b.new_range[0]
        if b.kind == "equal":
            assert ow == nw > 0
            for k in range(ow):
                assert old[b.old_range[0] + k] == new[b.new_range[0] + k] != ""
        elif b.kind == "replace":
            assert ow > 0 and nw > 0
        elif b.kind == "delete":
            assert ow > 0 and nw == 0
        else:
            assert b.kind == "insert" and ow == 0 and nw > 0

    pairs = equal_pairs(blocks)
    assert all(a < c and b < d for (a, b), (c, d) in zip(pairs, pairs[1:]))

    # Equal blocks plus replace regions tile both documents exactly.
    old_iv = sorted([b.old_range for b in blocks if b.kind == "equal"]
                    + [(r[0], r[1]) for r in replace_regions(blocks)])
    new_iv = sorted([b.new_range for b in blocks if b.kind == "equal"]
                    + [(r[2], r[3]) for r in replace_regions(blocks)])
    assert_tiles(old_iv, len(old))
    assert_tiles(new_iv, len(new))


# Four long pages (hashable), one near-duplicate, one short page (hashes
# to ""), and two blank variants.
PAGE_POOL = (
    "第1章 設計方針 本建物は許容応力度計算により安全性を確認するものとする。" * 2,
    "第2章 荷重条件 固定荷重および積載荷重を集計し各階の柱へ配分している。" * 2,
    "第3章 応力解析 立体骨組モデルにより部材応力と層間変形角を算定した。" * 2,
    "第4章 断面算定 柱および梁の検定比がすべて1.0以下であることを確認した。" * 2,
    "第2章 荷重条件 固定荷重および積雪荷重を集計し各階の柱へ配分している。" * 2,
    "付録 参考資料",
    "",
    "　 \n",
)

MATCH_TYPES = {"ExactHash", "DrawingNumber", "SectionTitle", "PageShift",
               "TextSimilar", "PositionInterp", "ContentSimilar", "PositionMatch"}
page_lists = st.lists(st.sampled_from(PAGE_POOL), max_size=6)


@SUITE
@given(old=page_lists, new=page_lists)
def test_matching_is_one_to_one_partition(old, new):
    result = compare_bundles(make_bundle("o", old), make_bundle("n", new))

    old_matched = [m.old_index for m in result.matches]
    new_matched = [m.new_index for m in result.matches]
    assert len(set(old_matched)) == len(old_matched)
    assert len(set(new_matched)) == len(new_matched)

    assert sorted(old_matched + result.deleted
                  + result.unmatched_blank_old) == list(range(len(old)))
    assert sorted(new_matched + result.inserted
                  + result.unmatched_blank_new) == list(range(len(new)))
    assert result.orphans == []

    for m in result.matches:
        assert 0.0 <= m.confidence <= 1.0
        assert m.match_type in MATCH_TYPES
        assert m.source in {"LCS", "SevenPhase", "DP"}

    # Blank bookkeeping: suppressed pages are exactly the no-signal ones.
    for idx in result.unmatched_blank_old:
        assert normalize_text(old[idx]) == ""
    for idx in result.unmatched_blank_new:
        assert normalize_text(new[idx]) == ""
    for idx in result.deleted:
        assert normalize_text(old[idx]) != ""
    for idx in result.inserted:
        assert normalize_text(new[idx]) != ""

    again = compare_bundles(make_bundle("o", old), make_bundle("n", new))
    assert again == result


small_rasters = hnp.arrays(np.uint8, (16, 16), elements=st.integers(0, 255))


@SUITE
@given(a=st.text(max_size=200), b=st.text(max_size=200), img=small_rasters)
def test_identical_inputs_diff_silent(a, b, img):
    same = text_diff(a, a)
    assert same.changed_spans() == 0

    diff = text_diff(a, b)
    assert "".join(a[s.old_range[0]:s.old_range[1]] for s in diff.spans
                   if s.kind != "Added") == a
    assert "".join(b[s.new_range[0]:s.new_range[1]] for s in diff.spans
                   if s.kind != "Deleted") == b
    for s in diff.spans:
        assert len(s.excerpt) <= 80
        ow = s.old_range[1] - s.old_range[0]
        nw = s.new_range[1] - s.new_range[0]
        if s.kind == "Unchanged":
            assert ow == nw > 0
            assert a[s.old_range[0]:s.old_range[1]] == b[s.new_range[0]:s.new_range[1]]
        elif s.kind == "Deleted":
            assert ow > 0 and nw == 0
        else:
            assert s.kind == "Added" and ow == 0 and nw > 0

    table = make_table([[a[:10], b[:10]], [a[10:20], "x"]])
    tdiff = table_diff([table], [table])
    assert tdiff.changed_cells == [] and tdiff.added_tables == []

    vdiff = visual_diff(img, img.copy())
    assert vdiff.regions == [] and vdiff.changed_pixel_fraction == 0.0
