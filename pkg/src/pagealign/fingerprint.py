"""Per-page fingerprints: content hash, drawing number, section title, pHash.

Fingerprints are the only page features the matching stages look at, so
every rule here is deliberately deterministic. Text normalization collapses
whitespace (including full-width spaces) and lowercases; hashes are MD5 of
the normalized text; the perceptual hash is a 64-bit DCT sign pattern.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dctn

from .bundle import LOW_RASTER_SIZE, PageRecord

# Pages shorter than this normalized length hash to "" (too little signal
# for byte-identity to mean anything).
MIN_HASH_CHARS = 50
# Perceptual hashes are only computed for text-poor pages with a raster.
PHASH_TEXT_LIMIT = 200
PHASH_BITS = 63


class DimensionError(Exception):
    """Raster passed to compute_phash is not 32x32 single channel."""


@dataclass
class PageFingerprint:
    index: int
    content_hash: str
    drawing_number: str
    section_title: str
    phash: int | None


@lru_cache(maxsize=4096)
def normalize_text(text: str) -> str:
    """Collapse runs of whitespace to single spaces, strip, lowercase."""
    return re.sub(r"\s+", " ", text).strip().lower()


def content_hash(page: PageRecord) -> str:
    """MD5 hex digest of the normalized text, or "" below MIN_HASH_CHARS."""
    norm = normalize_text(page.text)
    if len(norm) < MIN_HASH_CHARS:
        return ""
    return hashlib.md5(norm.encode("utf-8")).hexdigest()


# Full-width latin letters, digits, and the two common full-width dashes
# fold to their ASCII forms before pattern matching.
_FOLD = {code: code - 0xFEE0 for code in range(0xFF21, 0xFF3B)}
_FOLD.update({code: code - 0xFEE0 for code in range(0xFF41, 0xFF5B)})
_FOLD.update({code: code - 0xFEE0 for code in range(0xFF10, 0xFF1A)})
_FOLD[0xFF0D] = ord("-")
_FOLD[0x2212] = ord("-")

_DRAWING_RE = re.compile(
    r"(?<![A-Za-z0-9])([A-Za-z]{1,3})(-?)([0-9]{1,3})([A-Za-z0-9]?)(?![A-Za-z0-9])"
)


def extract_drawing_number(text: str) -> str:
    """First drawing-number token (e.g. A-01, KOU-12, B4), uppercased.

    Full-width latin, digits, and minus signs are folded to ASCII first.
    Returns "" when no token matches.
    """
    folded = text.translate(_FOLD)
    m = _DRAWING_RE.search(folded)
    if m is None:
        return ""
    return "".join(m.groups()).upper()


def extract_section_title(text: str) -> str:
    """First line whose normalized form has at least 4 characters.

    Returns the normalized line truncated to 80 characters, or "".
    """
    for line in text.splitlines():
        norm = normalize_text(line)
        if len(norm) >= 4:
            return norm[:80]
    return ""


def compute_phash(raster: np.ndarray) -> int:
    """64-bit perceptual hash of a 32x32 grayscale raster.

    2-D orthonormal DCT, take the top-left 8x8 block, drop the DC term,
    and set bit k when the k-th remaining coefficient (row-major) exceeds
    the median of all 63. Bit 63 is always zero.
    """
    if raster.shape != (LOW_RASTER_SIZE, LOW_RASTER_SIZE):
        raise DimensionError(f"expected {LOW_RASTER_SIZE}x{LOW_RASTER_SIZE}, got {raster.shape}")
    coeffs = dctn(raster.astype(np.float64), type=2, norm="ortho")
    block = coeffs[:8, :8]
    ac = np.concatenate([block[0, 1:], block[1:, :].ravel()])
    median = float(np.median(ac))
    value = 0
    for bit, coeff in enumerate(ac):
        if coeff > median:
            value |= 1 << bit
    return value


def phash_similarity(a: int, b: int) -> float:
    """1 minus the fraction of the 63 informative bits that differ."""
    return 1.0 - ((a ^ b).bit_count() / PHASH_BITS)


def fingerprint_page(page: PageRecord) -> PageFingerprint:
    phash = None
    if page.char_count < PHASH_TEXT_LIMIT and page.raster_low is not None:
        phash = compute_phash(page.raster_low)
    return PageFingerprint(
        index=page.index,
        content_hash=content_hash(page),
        drawing_number=extract_drawing_number(page.text),
        section_title=extract_section_title(page.text),
        phash=phash,
    )


def fingerprint_pages(pages: list[PageRecord]) -> list[PageFingerprint]:
    return [fingerprint_page(p) for p in pages]
