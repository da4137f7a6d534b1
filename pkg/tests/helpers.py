"""Shared builders for test bundles and fixture paths."""
from __future__ import annotations

from pathlib import Path

from pagealign.bundle import DocumentBundle, PageRecord, TableGrid

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def make_page(index: int, text: str, tables=None, raster_low=None,
              raster_high=None) -> PageRecord:
    return PageRecord(index=index, text=text, char_count=len(text),
                      tables=list(tables or []), raster_low=raster_low,
                      raster_high=raster_high)


def make_bundle(doc_id: str, texts: list[str]) -> DocumentBundle:
    pages = [make_page(i, t) for i, t in enumerate(texts)]
    return DocumentBundle(doc_id=doc_id, page_count=len(pages), pages=pages)


def make_table(rows: list[list[str]]) -> TableGrid:
    return TableGrid(rows=rows)
