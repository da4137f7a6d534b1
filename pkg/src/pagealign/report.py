"""Report emission: canonical JSON, annotated composites, HTML index.

The JSON report is byte-stable for identical inputs: keys are written in a
fixed order and nothing time-dependent goes in. The run timestamp lives in
a sidecar file instead so reports can be compared directly.
"""
from __future__ import annotations

import html
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import cv2
import numpy as np

from .consensus import MatchResult, PageMatch
from .diff_engine import PairDiff, RasterMissing

GUTTER = 16
OUTLINE_PX = 2
OUTLINE_BGR = (0, 0, 255)


@dataclass
class ComparisonReport:
    old_doc_id: str
    new_doc_id: str
    mode: str
    matches: list[dict]
    inserted: list[int]
    deleted: list[int]
    orphans: list[int]
    unmatched_blank_old: list[int]
    unmatched_blank_new: list[int]
    engine_version: str
    config: dict


def _match_row(match: PageMatch, diff: PairDiff | None) -> dict:
    row: dict[str, object] = {
        "old": match.old_index,
        "new": match.new_index,
        "type": match.match_type,
        "confidence": round(match.confidence, 6),
        "source": match.source,
        "text_spans": 0,
        "changed_cells": 0,
        "visual_regions": 0,
        "changed_pixel_fraction": None,
    }
    if diff is not None:
        row["text_spans"] = diff.text.changed_spans()
        row["changed_cells"] = len(diff.tables.changed_cells)
        if diff.visual is not None:
            row["visual_regions"] = len(diff.visual.regions)
            row["changed_pixel_fraction"] = round(diff.visual.changed_pixel_fraction, 6)
    return row


def build_report(match_result: MatchResult, pair_diffs: list[PairDiff],
                 config: dict, old_doc_id: str, new_doc_id: str,
                 mode: str, engine_version: str) -> ComparisonReport:
    """Assemble the report structure; all lists index-sorted."""
    by_pair = {(d.old_index, d.new_index): d for d in pair_diffs}
    rows = [_match_row(m, by_pair.get((m.old_index, m.new_index)))
            for m in sorted(match_result.matches, key=lambda m: (m.old_index, m.new_index))]
    return ComparisonReport(
        old_doc_id=old_doc_id,
        new_doc_id=new_doc_id,
        mode=mode,
        matches=rows,
        inserted=sorted(match_result.inserted),
        deleted=sorted(match_result.deleted),
        orphans=sorted(match_result.orphans),
        unmatched_blank_old=sorted(match_result.unmatched_blank_old),
        unmatched_blank_new=sorted(match_result.unmatched_blank_new),
        engine_version=engine_version,
        config=config,
    )


def report_to_json(report: ComparisonReport) -> str:
    return json.dumps(asdict(report), ensure_ascii=False, indent=2,
                      sort_keys=False) + "\n"


def _as_bgr(img: np.ndarray) -> np.ndarray:
    if img.ndim == 2:
        return cv2.cvtColor(img, cv2.COLOR_GRAY2BGR)
    return img


def render_side_by_side(pair_diff: PairDiff, old_raster: np.ndarray | None,
                        new_raster: np.ndarray | None) -> np.ndarray:
    """Old and new renders left/right with change boxes on the new side.

    Both panes are scaled to the larger dimensions (same rule as the visual
    diff, so the boxes land where the diff found them) and separated by a
    white gutter.
    """
    if old_raster is None or new_raster is None:
        raise RasterMissing("composite rendering requires rasters on both sides")
    a, b = _as_bgr(old_raster), _as_bgr(new_raster)
    height = max(a.shape[0], b.shape[0])
    width = max(a.shape[1], b.shape[1])
    if a.shape[:2] != (height, width):
        a = cv2.resize(a, (width, height), interpolation=cv2.INTER_LINEAR)
    if b.shape[:2] != (height, width):
        b = cv2.resize(b, (width, height), interpolation=cv2.INTER_LINEAR)
    canvas = np.full((height, width * 2 + GUTTER, 3), 255, np.uint8)
    canvas[:, :width] = a
    canvas[:, width + GUTTER:] = b
    if pair_diff.visual is not None:
        for x, y, w, h in pair_diff.visual.regions:
            cv2.rectangle(canvas, (width + GUTTER + x, y), (width + GUTTER + x + w, y + h),
                          OUTLINE_BGR, OUTLINE_PX)
    return canvas


def _page_list(title: str, indices: list[int]) -> str:
    if not indices:
        return ""
    items = ", ".join(str(i) for i in indices)
    return f"<h2>{html.escape(title)}</h2>\n<p>{items}</p>\n"


def emit_html(report: ComparisonReport, composites: dict[tuple[int, int], str],
              out_dir: str | Path) -> Path:
    """Write a static index page; returns its path.

    composites maps (old, new) to a path relative to out_dir.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    total_changed = sum(r["text_spans"] + r["changed_cells"] + r["visual_regions"]
                        for r in report.matches)
    has_changes = bool(total_changed or report.inserted or report.deleted
                       or report.orphans)
    parts = [
        "<!DOCTYPE html>",
        "<html><head><meta charset='utf-8'>",
        f"<title>{html.escape(report.old_doc_id)} vs {html.escape(report.new_doc_id)}</title>",
        "<style>body{font-family:sans-serif;margin:2em}"
        "table{border-collapse:collapse}td,th{border:1px solid #999;padding:4px 8px}"
        "</style></head><body>",
        f"<h1>{html.escape(report.old_doc_id)} vs {html.escape(report.new_doc_id)}"
        f" ({html.escape(report.mode)} mode)</h1>",
    ]
    if not has_changes:
        parts.append("<p>No changes detected.</p>")
    parts.append("<table><tr><th>old</th><th>new</th><th>type</th><th>confidence</th>"
                 "<th>text spans</th><th>cells</th><th>regions</th><th>view</th></tr>")
    for row in report.matches:
        link = composites.get((row["old"], row["new"]))
        view = f"<a href='{html.escape(link)}'>composite</a>" if link else ""
        parts.append(
            f"<tr><td>{row['old']}</td><td>{row['new']}</td><td>{row['type']}</td>"
            f"<td>{row['confidence']:.2f}</td><td>{row['text_spans']}</td>"
            f"<td>{row['changed_cells']}</td><td>{row['visual_regions']}</td>"
            f"<td>{view}</td></tr>")
    parts.append("</table>")
    parts.append(_page_list("Inserted pages", report.inserted))
    parts.append(_page_list("Deleted pages", report.deleted))
    parts.append(_page_list("Orphan pages (patch mode)", report.orphans))
    parts.append(_page_list("Unmatched blank pages (old)", report.unmatched_blank_old))
    parts.append(_page_list("Unmatched blank pages (new)", report.unmatched_blank_new))
    parts.append("</body></html>")
    target = out_dir / "index.html"
    target.write_text("\n".join(p for p in parts if p), encoding="utf-8")
    return target
