"""Gap-scored global alignment over the pages of one uncertain region.

A classic fill-and-traceback alignment: diagonal steps pair pages and earn
the pair score, horizontal and vertical steps leave a page unmatched and
pay the gap penalty. The pair score blends text similarity, an optional
perceptual-hash similarity, length ratio, and positional proximity, plus
flat bonuses for matching identity keys.
"""
from __future__ import annotations

from dataclasses import dataclass

from .bundle import PageRecord
from .fingerprint import PageFingerprint, phash_similarity
from .lcs_align import SimilarityCache

# Blend weights for the pair score.
W_BLEND = 0.55
W_LENGTH = 0.20
W_POSITION = 0.15
BONUS_HASH = 0.50
BONUS_DRAWING = 0.35
BONUS_DRAWING_SUBSTRING = 0.10
BONUS_TITLE = 0.20
# Text/visual mix inside the blended similarity.
TEXT_SHARE = 0.40
VISUAL_SHARE = 0.60


@dataclass
class DpConfig:
    gap_penalty: float = -0.42
    content_similar_threshold: float = 0.28
    position_match_cap: float = 0.60


@dataclass
class PairScore:
    s_text: float
    s_visual: float | None
    s_blend: float
    s_length: float
    p_position: float
    bonus: float
    total: float


@dataclass
class AlignedPair:
    old_index: int
    new_index: int
    match_type: str
    confidence: float
    score: PairScore


@dataclass
class RegionAlignment:
    pairs: list[AlignedPair]
    gap_old: list[int]
    gap_new: list[int]
    total_score: float


def length_ratio(a: PageRecord, b: PageRecord) -> float:
    """min/max of the character counts; both empty is 1.0, one empty is 0.0."""
    ca, cb = a.char_count, b.char_count
    if ca == 0 and cb == 0:
        return 1.0
    if ca == 0 or cb == 0:
        return 0.0
    return min(ca, cb) / max(ca, cb)


def positional_score(i: int, j: int, m: int, n: int) -> float:
    """1 minus the distance between relative positions i/m and j/n (0-based)."""
    return 1.0 - abs(i / m - j / n)


def _proper_substring(a: str, b: str) -> bool:
    if not a or not b or a == b:
        return False
    shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
    return len(shorter) >= 2 and shorter in longer


def pair_score(old_page: PageRecord, old_fp: PageFingerprint,
               new_page: PageRecord, new_fp: PageFingerprint,
               s_text: float, i: int, j: int, m: int, n: int) -> PairScore:
    """Score one candidate pairing at region-local positions (i, j).

    s_text is the text similarity (supplied by the caller's cache). The
    visual similarity joins the blend only when both pages carry a phash.
    """
    s_visual: float | None = None
    if old_fp.phash is not None and new_fp.phash is not None:
        s_visual = phash_similarity(old_fp.phash, new_fp.phash)
    s_blend = (TEXT_SHARE * s_text + VISUAL_SHARE * s_visual
               if s_visual is not None else s_text)
    s_length = length_ratio(old_page, new_page)
    p_position = positional_score(i, j, m, n)

    bonus = 0.0
    if old_fp.content_hash and old_fp.content_hash == new_fp.content_hash:
        bonus += BONUS_HASH
    if old_fp.drawing_number and old_fp.drawing_number == new_fp.drawing_number:
        bonus += BONUS_DRAWING
    elif _proper_substring(old_fp.drawing_number, new_fp.drawing_number):
        bonus += BONUS_DRAWING_SUBSTRING
    if old_fp.section_title and old_fp.section_title == new_fp.section_title:
        bonus += BONUS_TITLE

    total = W_BLEND * s_blend + W_LENGTH * s_length + W_POSITION * p_position + bonus
    return PairScore(s_text=s_text, s_visual=s_visual, s_blend=s_blend,
                     s_length=s_length, p_position=p_position, bonus=bonus, total=total)


def classify(score: float, cfg: DpConfig) -> tuple[str, float]:
    """Map a pair score to (match_type, confidence)."""
    if score >= cfg.content_similar_threshold:
        return "ContentSimilar", min(1.0, score)
    return "PositionMatch", min(max(score, 0.0), cfg.position_match_cap)


def align_region(old_idx: list[int], new_idx: list[int],
                 pages_old: list[PageRecord], pages_new: list[PageRecord],
                 fps_old: list[PageFingerprint], fps_new: list[PageFingerprint],
                 sim: SimilarityCache, cfg: DpConfig,
                 provisional: dict[tuple[int, int], float] | None = None) -> RegionAlignment:
    """Align two page-index lists, pairing or gapping every page.

    Ties in the recurrence break diagonal first, then the old-side gap,
    then the new-side gap, so tied layouts resolve identically everywhere.
    When a produced pair also appears in provisional (earlier heuristic
    matches), its confidence is capped by the provisional confidence.
    """
    m, n = len(old_idx), len(new_idx)
    g = cfg.gap_penalty
    scores = [[pair_score(pages_old[old_idx[i]], fps_old[old_idx[i]],
                          pages_new[new_idx[j]], fps_new[new_idx[j]],
                          sim.ratio(old_idx[i], new_idx[j]), i, j, m, n)
               for j in range(n)] for i in range(m)]

    dp = [[0.0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = i * g
    for j in range(1, n + 1):
        dp[0][j] = j * g
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            dp[i][j] = max(dp[i - 1][j - 1] + scores[i - 1][j - 1].total,
                           dp[i - 1][j] + g,
                           dp[i][j - 1] + g)

    pairs: list[AlignedPair] = []
    gap_old: list[int] = []
    gap_new: list[int] = []
    i, j = m, n
    while i > 0 or j > 0:
        if (i > 0 and j > 0
                and dp[i][j] == dp[i - 1][j - 1] + scores[i - 1][j - 1].total):
            ps = scores[i - 1][j - 1]
            match_type, confidence = classify(ps.total, cfg)
            o, nn = old_idx[i - 1], new_idx[j - 1]
            if provisional and (o, nn) in provisional:
                confidence = min(confidence, provisional[(o, nn)])
            pairs.append(AlignedPair(o, nn, match_type, confidence, ps))
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + g:
            gap_old.append(old_idx[i - 1])
            i -= 1
        else:
            gap_new.append(new_idx[j - 1])
            j -= 1
    pairs.reverse()
    gap_old.reverse()
    gap_new.reverse()
    return RegionAlignment(pairs=pairs, gap_old=gap_old, gap_new=gap_new,
                           total_score=dp[m][n])
