"""Coarse alignment: longest-common-block decomposition of hash sequences.

Pages whose content hash is "" (blank or near-blank) never participate in a
match here, and a matching block is never extended through them; they always
land in the gap segments between equal blocks. difflib's junk facility would
extend matches across junk elements, which breaks that guarantee, so the
block search is implemented directly.
"""
from __future__ import annotations

import difflib
from dataclasses import dataclass

from .fingerprint import normalize_text


@dataclass
class AlignmentBlock:
    """One segment of the pairwise decomposition.

    kind is one of "equal", "replace", "delete", "insert". Ranges are
    half-open page-index intervals; both sequences are fully covered by
    consecutive blocks.
    """

    kind: str
    old_range: tuple[int, int]
    new_range: tuple[int, int]


def _longest_match(a: list[str], b: list[str], alo: int, ahi: int,
                   blo: int, bhi: int) -> tuple[int, int, int]:
    b2j: dict[str, list[int]] = {}
    for j in range(blo, bhi):
        if b[j]:
            b2j.setdefault(b[j], []).append(j)
    besti, bestj, bestsize = alo, blo, 0
    j2len: dict[int, int] = {}
    for i in range(alo, ahi):
        newj2len: dict[int, int] = {}
        for j in b2j.get(a[i], ()):
            k = j2len.get(j - 1, 0) + 1
            newj2len[j] = k
            if k > bestsize:
                besti, bestj, bestsize = i - k + 1, j - k + 1, k
        j2len = newj2len
    return besti, bestj, bestsize


def _matching_blocks(a: list[str], b: list[str]) -> list[tuple[int, int, int]]:
    queue = [(0, len(a), 0, len(b))]
    found: list[tuple[int, int, int]] = []
    while queue:
        alo, ahi, blo, bhi = queue.pop()
        i, j, k = _longest_match(a, b, alo, ahi, blo, bhi)
        if k:
            found.append((i, j, k))
            queue.append((alo, i, blo, j))
            queue.append((i + k, ahi, j + k, bhi))
    found.sort()
    # Coalesce adjacent blocks so each equal run is reported once.
    merged: list[tuple[int, int, int]] = []
    for i, j, k in found:
        if merged and merged[-1][0] + merged[-1][2] == i and merged[-1][1] + merged[-1][2] == j:
            pi, pj, pk = merged[-1]
            merged[-1] = (pi, pj, pk + k)
        else:
            merged.append((i, j, k))
    return merged


def sequence_blocks(old_hashes: list[str], new_hashes: list[str]) -> list[AlignmentBlock]:
    """Decompose two hash sequences into equal and differing segments."""
    blocks: list[AlignmentBlock] = []
    i = j = 0
    for ai, bj, size in _matching_blocks(old_hashes, new_hashes) + [
        (len(old_hashes), len(new_hashes), 0)
    ]:
        if i < ai and j < bj:
            blocks.append(AlignmentBlock("replace", (i, ai), (j, bj)))
        elif i < ai:
            blocks.append(AlignmentBlock("delete", (i, ai), (j, bj)))
        elif j < bj:
            blocks.append(AlignmentBlock("insert", (i, ai), (j, bj)))
        if size:
            blocks.append(AlignmentBlock("equal", (ai, ai + size), (bj, bj + size)))
        i, j = ai + size, bj + size
    return blocks


def equal_pairs(blocks: list[AlignmentBlock]) -> list[tuple[int, int]]:
    """Page-index pairs covered by equal blocks, in document order."""
    pairs: list[tuple[int, int]] = []
    for block in blocks:
        if block.kind != "equal":
            continue
        (olo, ohi), (nlo, _) = block.old_range, block.new_range
        pairs.extend((o, nlo + (o - olo)) for o in range(olo, ohi))
    return pairs


def replace_regions(blocks: list[AlignmentBlock]) -> list[tuple[int, int, int, int]]:
    """Maximal runs of non-equal blocks, merged into (olo, ohi, nlo, nhi).

    These are the uncertain stretches the fine-grained matchers work on.
    """
    regions: list[tuple[int, int, int, int]] = []
    run: list[AlignmentBlock] = []
    for block in blocks + [AlignmentBlock("equal", (0, 0), (0, 0))]:
        if block.kind == "equal":
            if run:
                regions.append((run[0].old_range[0], run[-1].old_range[1],
                                run[0].new_range[0], run[-1].new_range[1]))
                run = []
        else:
            run.append(block)
    return regions


def text_similarity(a: str, b: str) -> float:
    """Ratio of matched characters between normalized texts, in [0, 1].

    2*M/T where M is the total matched length and T the combined length.
    Two empty normalized texts score 0.0: emptiness is no evidence of
    sameness.
    """
    na, nb = normalize_text(a), normalize_text(b)
    if not na and not nb:
        return 0.0
    return difflib.SequenceMatcher(None, na, nb, autojunk=False).ratio()


class SimilarityCache:
    """Memoized pairwise text similarity over two page lists.

    Similarity is symmetric in value but keyed (old, new); pages are
    addressed by document index.
    """

    def __init__(self, old_texts: list[str], new_texts: list[str]):
        self.norm_old = [normalize_text(t) for t in old_texts]
        self.norm_new = [normalize_text(t) for t in new_texts]
        self._memo: dict[tuple[int, int], float] = {}

    def ratio(self, old_index: int, new_index: int) -> float:
        key = (old_index, new_index)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        a, b = self.norm_old[old_index], self.norm_new[new_index]
        if not a and not b:
            value = 0.0
        else:
            value = difflib.SequenceMatcher(None, a, b, autojunk=False).ratio()
        self._memo[key] = value
        return value
