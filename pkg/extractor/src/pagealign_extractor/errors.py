"""Error types raised by the extractor."""
from __future__ import annotations


class ExtractorError(Exception):
    """Base class for extraction failures."""


class PdfReadError(ExtractorError):
    """The file is not a PDF this reader can parse."""


class EncryptedPdf(ExtractorError):
    """The PDF declares encryption; extraction does not decrypt."""


class RenderFailure(ExtractorError):
    """A single page could not be interpreted or rasterized."""

    def __init__(self, page_index: int, message: str) -> None:
        super().__init__(f"page {page_index}: {message}")
        self.page_index = page_index
