"""Region matcher: a cascade of increasingly permissive pairing phases.

Within one uncertain region the phases run in a fixed order, each consuming
only pages left unmatched by earlier ones:

  1. exact content hash          -> final, confidence 1.0
  2. drawing number              -> final, 0.9
  3. section title               -> final, 0.8
  4. dominant page shift vote    -> provisional, 0.85
  5. greedy text similarity      -> provisional, min(0.85, sim)
  6. position interpolation      -> provisional, decayed sim
  7. residual classification; optionally a perceptual-hash rematch (7.5)
     over the residuals -> final, confidence = phash similarity

Final matches are authoritative; provisional ones are later arbitrated by
the gap-scored alignment stage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fingerprint import PageFingerprint, phash_similarity
from .lcs_align import SimilarityCache

ADJACENCY_DECAY = 0.1

VISUAL_PHASE = 7.5


@dataclass
class SevenPhaseConfig:
    tau_s: float = 0.5            # text-similarity acceptance (phases 4, 5)
    shift_fraction: float = 0.30  # fraction of the smaller side that must vote
    shift_min_votes: int = 2
    adjacency_max_d: int = 3      # max distance from interpolated position
    adjacency_accept: float = 0.3
    phash_accept: float = 0.45


@dataclass
class CandidateMatch:
    old_index: int
    new_index: int
    match_type: str
    confidence: float
    phase: float


@dataclass
class Region:
    """Mutable matching state over one uncertain stretch of pages."""

    old_indices: list[int]
    new_indices: list[int]
    matched_old: set[int] = field(default_factory=set)
    matched_new: set[int] = field(default_factory=set)

    def unmatched_old(self) -> list[int]:
        return [i for i in self.old_indices if i not in self.matched_old]

    def unmatched_new(self) -> list[int]:
        return [j for j in self.new_indices if j not in self.matched_new]

    def apply(self, matches: list[CandidateMatch]) -> None:
        for m in matches:
            self.matched_old.add(m.old_index)
            self.matched_new.add(m.new_index)


@dataclass
class RegionMatches:
    """Outcome of the cascade for one region."""

    final: list[CandidateMatch]
    provisional: list[CandidateMatch]
    unmatched_old: list[int]
    unmatched_new: list[int]


_KEY_RULES = {
    "hash": ("content_hash", "ExactHash", 1.0, 1.0),
    "drawing": ("drawing_number", "DrawingNumber", 0.9, 2.0),
    "title": ("section_title", "SectionTitle", 0.8, 3.0),
}


def match_exact_keys(region: Region, key: str, fps_old: list[PageFingerprint],
                     fps_new: list[PageFingerprint]) -> list[CandidateMatch]:
    """Pair unmatched pages whose key values are equal and non-empty.

    When a value occurs several times on both sides, occurrences pair up
    in document order. key is "hash", "drawing", or "title".
    """
    attr, match_type, confidence, phase = _KEY_RULES[key]
    available: dict[str, list[int]] = {}
    for j in region.unmatched_new():
        value = getattr(fps_new[j], attr)
        if value:
            available.setdefault(value, []).append(j)
    matches: list[CandidateMatch] = []
    for i in region.unmatched_old():
        value = getattr(fps_old[i], attr)
        if not value:
            continue
        slot = available.get(value)
        if slot:
            matches.append(CandidateMatch(i, slot.pop(0), match_type, confidence, phase))
    return matches


def detect_page_shift(region: Region, sim: SimilarityCache,
                      cfg: SevenPhaseConfig) -> tuple[int, list[CandidateMatch]] | None:
    """Find one dominant offset between the unmatched page lists.

    Every unmatched old page votes for offsets delta where the new page
    delta positions over (in unmatched order) clears tau_s. The offset with
    the most votes wins if the votes reach max(shift_min_votes,
    ceil(shift_fraction * smaller side)); ties prefer smaller |delta|, then
    the negative one. Returns (delta, matches) or None.
    """
    uo, un = region.unmatched_old(), region.unmatched_new()
    m_b, n_b = len(uo), len(un)
    if m_b == 0 or n_b == 0:
        return None
    deltas = sorted(range(-(m_b // 2), n_b // 2 + 1), key=lambda d: (abs(d), d))
    best_delta: int | None = None
    best_pairs: list[tuple[int, int]] = []
    for delta in deltas:
        pairs = []
        for pos, o in enumerate(uo):
            tgt = pos + delta
            if 0 <= tgt < n_b and sim.ratio(o, un[tgt]) >= cfg.tau_s:
                pairs.append((o, un[tgt]))
        if len(pairs) > len(best_pairs):
            best_delta, best_pairs = delta, pairs
    needed = max(cfg.shift_min_votes, math.ceil(cfg.shift_fraction * min(m_b, n_b)))
    if best_delta is None or len(best_pairs) < needed:
        return None
    matches = [CandidateMatch(o, n, "PageShift", 0.85, 4.0) for o, n in best_pairs]
    return best_delta, matches


def match_text_similarity(region: Region, sim: SimilarityCache,
                          cfg: SevenPhaseConfig) -> list[CandidateMatch]:
    """Greedy one-to-one pairing of pages whose similarity clears tau_s."""
    candidates = []
    for o in region.unmatched_old():
        for n in region.unmatched_new():
            s = sim.ratio(o, n)
            if s >= cfg.tau_s:
                candidates.append((s, o, n))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    taken_old: set[int] = set()
    taken_new: set[int] = set()
    matches = []
    for s, o, n in candidates:
        if o in taken_old or n in taken_new:
            continue
        taken_old.add(o)
        taken_new.add(n)
        matches.append(CandidateMatch(o, n, "TextSimilar", min(0.85, s), 5.0))
    matches.sort(key=lambda m: m.old_index)
    return matches


def _interpolate(o: int, anchors: list[tuple[int, int]]) -> float | None:
    below = None
    above = None
    for ao, an in anchors:
        if ao <= o and (below is None or ao > below[0]):
            below = (ao, an)
        if ao >= o and (above is None or ao < above[0]):
            above = (ao, an)
    if below is None and above is None:
        return None
    if below is not None and above is not None and below[0] != above[0]:
        (ao, an), (bo, bn) = below, above
        return an + (o - ao) * (bn - an) / (bo - ao)
    ao, an = below if below is not None else above  # type: ignore[misc]
    return an + (o - ao)


def match_position_interpolation(region: Region, sim: SimilarityCache,
                                 cfg: SevenPhaseConfig,
                                 anchors: list[tuple[int, int]]) -> list[CandidateMatch]:
    """Pair pages near their interpolated position, with decayed similarity.

    anchors are already-matched (old, new) pairs anywhere in the document.
    A candidate d pages away from the interpolated spot scores
    sim * (1 - ADJACENCY_DECAY * d) and must clear adjacency_accept with
    d <= adjacency_max_d. No-op when there are no anchors.
    """
    if not anchors:
        return []
    ordered = sorted(anchors)
    candidates = []
    for o in region.unmatched_old():
        expected = _interpolate(o, ordered)
        if expected is None:
            continue
        center = int(math.floor(expected + 0.5))
        for n in region.unmatched_new():
            d = abs(n - center)
            if d > cfg.adjacency_max_d:
                continue
            s = sim.ratio(o, n) * (1.0 - ADJACENCY_DECAY * d)
            if s >= cfg.adjacency_accept:
                candidates.append((s, o, n))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    taken_old: set[int] = set()
    taken_new: set[int] = set()
    matches = []
    for s, o, n in candidates:
        if o in taken_old or n in taken_new:
            continue
        taken_old.add(o)
        taken_new.add(n)
        matches.append(CandidateMatch(o, n, "PositionInterp", s, 6.0))
    matches.sort(key=lambda m: m.old_index)
    return matches


def classify_residuals(region: Region) -> tuple[list[int], list[int]]:
    """Pages left over after all pairing phases: (old side, new side)."""
    return region.unmatched_old(), region.unmatched_new()


def visual_rematch(unmatched_old: list[int], unmatched_new: list[int],
                   fps_old: list[PageFingerprint], fps_new: list[PageFingerprint],
                   cfg: SevenPhaseConfig) -> list[CandidateMatch]:
    """Greedy perceptual-hash pairing over residual pages.

    Only pages that carry a phash participate; pairs need similarity of at
    least phash_accept. Matches come back as ContentSimilar with the
    similarity as confidence.
    """
    candidates = []
    for o in unmatched_old:
        fo = fps_old[o]
        if fo.phash is None:
            continue
        for n in unmatched_new:
            fn = fps_new[n]
            if fn.phash is None:
                continue
            s = phash_similarity(fo.phash, fn.phash)
            if s >= cfg.phash_accept:
                candidates.append((s, o, n))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    taken_old: set[int] = set()
    taken_new: set[int] = set()
    matches = []
    for s, o, n in candidates:
        if o in taken_old or n in taken_new:
            continue
        taken_old.add(o)
        taken_new.add(n)
        matches.append(CandidateMatch(o, n, "ContentSimilar", s, VISUAL_PHASE))
    matches.sort(key=lambda m: m.old_index)
    return matches


def run_seven_phase(region: Region, fps_old: list[PageFingerprint],
                    fps_new: list[PageFingerprint], sim: SimilarityCache,
                    cfg: SevenPhaseConfig, anchors: list[tuple[int, int]] | None = None,
                    include_visual: bool = True) -> RegionMatches:
    """Run the full cascade over one region.

    anchors seed phase 6 with document-wide matched pairs; matches made by
    earlier phases in this region are added to them. include_visual controls
    whether the perceptual-hash rematch runs here or is deferred to a later,
    document-global pass.
    """
    final: list[CandidateMatch] = []
    provisional: list[CandidateMatch] = []
    local_anchors = list(anchors or [])

    for key in ("hash", "drawing", "title"):
        made = match_exact_keys(region, key, fps_old, fps_new)
        region.apply(made)
        final.extend(made)
        local_anchors.extend((m.old_index, m.new_index) for m in made)

    shifted = detect_page_shift(region, sim, cfg)
    if shifted is not None:
        _, made = shifted
        region.apply(made)
        provisional.extend(made)
        local_anchors.extend((m.old_index, m.new_index) for m in made)

    made = match_text_similarity(region, sim, cfg)
    region.apply(made)
    provisional.extend(made)
    local_anchors.extend((m.old_index, m.new_index) for m in made)

    made = match_position_interpolation(region, sim, cfg, local_anchors)
    region.apply(made)
    provisional.extend(made)

    res_old, res_new = classify_residuals(region)
    if include_visual:
        made = visual_rematch(res_old, res_new, fps_old, fps_new, cfg)
        region.apply(made)
        final.extend(made)
        res_old, res_new = classify_residuals(region)

    return RegionMatches(final=final, provisional=provisional,
                         unmatched_old=res_old, unmatched_new=res_new)
