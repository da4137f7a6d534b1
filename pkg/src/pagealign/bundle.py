"""Bundle loading, validation, and the on-disk interchange format.

A bundle is a directory with a ``manifest.json`` plus an optional
``rasters/`` subdirectory holding PNG files. The manifest layout:

    {
      "doc_id": str,
      "page_count": int,
      "pages": [
        {
          "index": int,            # 0-based, contiguous, ascending
          "text": str,
          "char_count": int,        # must equal len(text)
          "tables": [[[str]]],      # list of tables, each a list of rows
          "raster_low": str|null,   # manifest-relative PNG path, 32x32 gray
          "raster_high": str|null   # manifest-relative PNG path, any size
        }, ...
      ]
    }

``load_bundle`` is strict: schema problems raise rather than degrade, so
downstream stages can assume a well-formed document.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

LOW_RASTER_SIZE = 32


class BundleError(Exception):
    """Base class for bundle validation failures."""


class MissingManifest(BundleError):
    """The bundle directory has no manifest.json."""


class SchemaViolation(BundleError):
    """A manifest field is missing, has the wrong type, or is inconsistent."""


class RasterDimensionError(BundleError):
    """A referenced raster is unreadable or has the wrong shape."""


class IndexGapError(BundleError):
    """Page indices are not contiguous from 0."""


class DuplicateIndexError(BundleError):
    """Two pages claim the same index."""


@dataclass
class TableGrid:
    """One detected table as a row-major cell grid. Rows may be ragged."""

    rows: list[list[str]]


@dataclass
class PageRecord:
    index: int
    text: str
    char_count: int
    tables: list[TableGrid] = field(default_factory=list)
    raster_low: np.ndarray | None = None
    raster_high: np.ndarray | None = None
    raster_low_path: str | None = None
    raster_high_path: str | None = None


@dataclass
class DocumentBundle:
    doc_id: str
    page_count: int
    pages: list[PageRecord]


@dataclass
class GroundTruth:
    """Reference alignment for evaluation: matched pairs plus unmatched pages."""

    matches: list[tuple[int, int]]
    inserted: list[int]
    deleted: list[int]


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaViolation(msg)


def _load_raster(base: Path, rel: str, *, low: bool) -> np.ndarray:
    path = base / rel
    if not path.is_file():
        raise RasterDimensionError(f"raster not found: {rel}")
    img = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE if low else cv2.IMREAD_UNCHANGED)
    if img is None:
        raise RasterDimensionError(f"raster not decodable: {rel}")
    if low and img.shape != (LOW_RASTER_SIZE, LOW_RASTER_SIZE):
        raise RasterDimensionError(
            f"low raster must be {LOW_RASTER_SIZE}x{LOW_RASTER_SIZE} grayscale, "
            f"got shape {img.shape}: {rel}"
        )
    return img


def _parse_page(raw: object, base: Path) -> PageRecord:
    _expect(isinstance(raw, dict), "page entry must be an object")
    assert isinstance(raw, dict)
    for key in ("index", "text", "char_count", "tables", "raster_low", "raster_high"):
        _expect(key in raw, f"page entry missing field {key!r}")
    index = raw["index"]
    text = raw["text"]
    char_count = raw["char_count"]
    _expect(isinstance(index, int) and not isinstance(index, bool), "page index must be int")
    _expect(isinstance(text, str), "page text must be str")
    _expect(isinstance(char_count, int) and not isinstance(char_count, bool),
            "char_count must be int")
    _expect(char_count == len(text),
            f"char_count {char_count} does not match len(text) {len(text)} on page {index}")

    tables: list[TableGrid] = []
    _expect(isinstance(raw["tables"], list), f"tables must be a list on page {index}")
    for t, grid in enumerate(raw["tables"]):
        _expect(isinstance(grid, list), f"table {t} on page {index} must be a list of rows")
        rows: list[list[str]] = []
        for r, row in enumerate(grid):
            _expect(isinstance(row, list), f"table {t} row {r} on page {index} must be a list")
            for cell in row:
                _expect(isinstance(cell, str), f"table {t} on page {index} has a non-str cell")
            rows.append(list(row))
        tables.append(TableGrid(rows=rows))

    page = PageRecord(index=index, text=text, char_count=char_count, tables=tables)
    for key, low in (("raster_low", True), ("raster_high", False)):
        rel = raw[key]
        if rel is None:
            continue
        _expect(isinstance(rel, str), f"{key} must be str or null on page {index}")
        img = _load_raster(base, rel, low=low)
        if low:
            page.raster_low = img
            page.raster_low_path = rel
        else:
            page.raster_high = img
            page.raster_high_path = rel
    return page


def load_bundle(path: str | Path) -> DocumentBundle:
    """Load and validate a bundle directory.

    Raises MissingManifest, SchemaViolation, RasterDimensionError,
    IndexGapError, or DuplicateIndexError on the first problem found.
    """
    base = Path(path)
    manifest = base / "manifest.json"
    if not manifest.is_file():
        raise MissingManifest(f"no manifest.json under {base}")
    try:
        raw = json.loads(manifest.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise SchemaViolation(f"manifest.json unreadable: {exc}") from exc

    _expect(isinstance(raw, dict), "manifest root must be an object")
    for key in ("doc_id", "page_count", "pages"):
        _expect(key in raw, f"manifest missing field {key!r}")
    _expect(isinstance(raw["doc_id"], str), "doc_id must be str")
    _expect(isinstance(raw["page_count"], int) and not isinstance(raw["page_count"], bool),
            "page_count must be int")
    _expect(isinstance(raw["pages"], list), "pages must be a list")
    _expect(raw["page_count"] == len(raw["pages"]),
            f"page_count {raw['page_count']} does not match pages length {len(raw['pages'])}")

    pages = [_parse_page(entry, base) for entry in raw["pages"]]

    seen: set[int] = set()
    for page in pages:
        if page.index in seen:
            raise DuplicateIndexError(f"page index {page.index} appears twice")
        seen.add(page.index)
    expected = list(range(len(pages)))
    actual = [p.index for p in pages]
    if sorted(actual) != expected:
        raise IndexGapError(f"page indices must cover 0..{len(pages) - 1}, got {sorted(actual)}")
    if actual != expected:
        pages.sort(key=lambda p: p.index)

    return DocumentBundle(doc_id=raw["doc_id"], page_count=len(pages), pages=pages)


def save_bundle(bundle: DocumentBundle, path: str | Path) -> Path:
    """Write a bundle directory. Raster arrays are encoded as PNG files.

    Pages are written in index order. Returns the manifest path.
    """
    base = Path(path)
    base.mkdir(parents=True, exist_ok=True)
    rasters = base / "rasters"
    entries = []
    for page in sorted(bundle.pages, key=lambda p: p.index):
        entry: dict[str, object] = {
            "index": page.index,
            "text": page.text,
            "char_count": page.char_count,
            "tables": [grid.rows for grid in page.tables],
            "raster_low": None,
            "raster_high": None,
        }
        for key, img, given in (
            ("raster_low", page.raster_low, page.raster_low_path),
            ("raster_high", page.raster_high, page.raster_high_path),
        ):
            if img is None:
                continue
            rel = given or f"rasters/page_{page.index:04d}_{key.split('_')[1]}.png"
            rasters.mkdir(exist_ok=True)
            target = base / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            if not cv2.imwrite(str(target), img):
                raise BundleError(f"could not write raster {rel}")
            entry[key] = rel
        entries.append(entry)

    manifest = {
        "doc_id": bundle.doc_id,
        "page_count": len(entries),
        "pages": entries,
    }
    out = base / "manifest.json"
    out.write_text(json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return out


def load_ground_truth(path: str | Path) -> GroundTruth:
    """Load a reference alignment file.

    Layout: {"matches": [[old,new],...], "inserted": [int], "deleted": [int]}.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    _expect(isinstance(raw, dict), "ground truth root must be an object")
    for key in ("matches", "inserted", "deleted"):
        _expect(key in raw and isinstance(raw[key], list), f"ground truth missing list {key!r}")
    matches: list[tuple[int, int]] = []
    for pair in raw["matches"]:
        _expect(isinstance(pair, list) and len(pair) == 2, "each match must be a [old,new] pair")
        o, n = pair
        _expect(isinstance(o, int) and isinstance(n, int), "match indices must be int")
        matches.append((o, n))
    for key in ("inserted", "deleted"):
        for idx in raw[key]:
            _expect(isinstance(idx, int), f"{key} entries must be int")
    return GroundTruth(matches=matches, inserted=list(raw["inserted"]),
                       deleted=list(raw["deleted"]))
