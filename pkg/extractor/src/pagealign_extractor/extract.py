"""PDF to bundle conversion.

``extract_pdf`` reads a PDF, interprets each page's content stream, and
writes a bundle directory: manifest.json plus per-page low and high
rasters. The output follows the bundle interchange layout (doc_id,
page_count, pages with index/text/char_count/tables/raster paths) and is
deterministic for a fixed input file and configuration.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import cv2

from .content import interpret, page_text
from .errors import ExtractorError, RenderFailure
from .pdf_reader import PdfReader
from .raster import low_raster, render_page
from .tables import detect_tables


@dataclass(frozen=True)
class ExtractionConfig:
    """Extraction knobs. DPI values must be positive."""

    low_dpi: int = 18
    low_size: tuple[int, int] = (32, 32)
    high_dpi: int = 150
    table_detection: bool = True

    def __post_init__(self) -> None:
        if self.low_dpi <= 0 or self.high_dpi <= 0:
            raise ValueError("dpi values must be positive")
        if min(self.low_size) <= 0:
            raise ValueError("low_size must be positive")


def extract_pdf(pdf_path: str | Path, out_dir: str | Path,
                config: ExtractionConfig | None = None, *,
                doc_id: str | None = None) -> Path:
    """Extract pdf_path into a bundle directory at out_dir.

    Returns out_dir. Raises PdfReadError or EncryptedPdf for
    document-level problems and RenderFailure (with the page index) when
    one page cannot be interpreted or rasterized.
    """
    cfg = config or ExtractionConfig()
    pdf_path = Path(pdf_path)
    reader = PdfReader(pdf_path)
    pages = reader.pages()

    out = Path(out_dir)
    rasters = out / "rasters"
    rasters.mkdir(parents=True, exist_ok=True)

    entries: list[dict[str, object]] = []
    for page in pages:
        i = page.index
        try:
            content = interpret(reader.page_content(page))
            text = page_text(content.runs)
            tables = detect_tables(content) if cfg.table_detection else []
            low = low_raster(content, page.mediabox, cfg.low_dpi, cfg.low_size)
            high = render_page(content, page.mediabox, cfg.high_dpi)
        except RenderFailure:
            raise
        except Exception as exc:
            raise RenderFailure(i, str(exc)) from exc
        low_rel = f"rasters/page_{i:04d}_low.png"
        high_rel = f"rasters/page_{i:04d}_high.png"
        for rel, img in ((low_rel, low), (high_rel, high)):
            if not cv2.imwrite(str(out / rel), img):
                raise RenderFailure(i, f"could not write {rel}")
        entries.append({
            "index": i,
            "text": text,
            "char_count": len(text),
            "tables": tables,
            "raster_low": low_rel,
            "raster_high": high_rel,
        })

    manifest = {
        "doc_id": doc_id or pdf_path.stem,
        "page_count": len(entries),
        "pages": entries,
    }
    target = out / "manifest.json"
    target.write_text(json.dumps(manifest, ensure_ascii=False, indent=2) + "\n",
                      encoding="utf-8")
    return out
