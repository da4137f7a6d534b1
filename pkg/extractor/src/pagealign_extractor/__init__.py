"""PDF extraction into the page-bundle interchange format."""
from __future__ import annotations

from .errors import EncryptedPdf, ExtractorError, PdfReadError, RenderFailure
from .extract import ExtractionConfig, extract_pdf

__version__ = "0.1.0"

__all__ = [
    "EncryptedPdf",
    "ExtractionConfig",
    "ExtractorError",
    "PdfReadError",
    "RenderFailure",
    "extract_pdf",
    "__version__",
]
