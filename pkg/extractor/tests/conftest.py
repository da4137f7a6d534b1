"""Shared fixtures for the extractor test suite."""
from __future__ import annotations

from pathlib import Path

import pytest

from authoring import author_pdf


@pytest.fixture(scope="session")
def pdf_path(tmp_path_factory) -> Path:
    return author_pdf(tmp_path_factory.mktemp("pdfs") / "threepage.pdf")
