"""Final page mapping: staged integration of the three matching layers.

Precedence is strict. Equal-block pairs from the coarse hash alignment are
accepted unconditionally; the region cascade's final matches (phases 1-3)
come next; the gap-scored alignment decides the rest. A later candidate
that reuses an index already claimed by an earlier stage is dropped whole,
and its pages fall back into the residual pools, where the document-global
perceptual-hash rematch gets a last look before pages are classified as
inserted or deleted.

Pages with no signal at all (empty normalized text and no perceptual hash)
are kept out of the gap-scored alignment and out of the inserted/deleted
lists: nothing observable distinguishes one blank from another, so claims
about them would be noise. They are reported separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bundle import DocumentBundle
from .dp_align import DpConfig, RegionAlignment, align_region
from .fingerprint import PageFingerprint, fingerprint_pages, normalize_text
from .lcs_align import AlignmentBlock, SimilarityCache, equal_pairs, replace_regions, \
    sequence_blocks
from .seven_phase import Region, RegionMatches, SevenPhaseConfig, run_seven_phase, \
    visual_rematch


class ConsistencyError(Exception):
    """A single integration stage tried to use one page index twice."""


@dataclass
class PipelineConfig:
    seven: SevenPhaseConfig = field(default_factory=SevenPhaseConfig)
    dp: DpConfig = field(default_factory=DpConfig)


@dataclass
class PageMatch:
    old_index: int
    new_index: int
    match_type: str
    confidence: float
    source: str


@dataclass
class MatchResult:
    """One-to-one page mapping plus the classification of everything else.

    Every old index appears exactly once across matches, deleted, orphans,
    and unmatched_blank_old; every new index exactly once across matches,
    inserted, and unmatched_blank_new.
    """

    matches: list[PageMatch]
    inserted: list[int]
    deleted: list[int]
    orphans: list[int] = field(default_factory=list)
    unmatched_blank_old: list[int] = field(default_factory=list)
    unmatched_blank_new: list[int] = field(default_factory=list)


def _no_signal(norm_text: str, fp: PageFingerprint) -> bool:
    return norm_text == "" and fp.phash is None


class _Ledger:
    """Tracks index usage across stages; enforces within-stage uniqueness."""

    def __init__(self) -> None:
        self.used_old: set[int] = set()
        self.used_new: set[int] = set()
        self.matches: list[PageMatch] = []

    def add_stage(self, candidates: list[PageMatch], stage: str) -> None:
        stage_old: set[int] = set()
        stage_new: set[int] = set()
        for cand in candidates:
            if cand.old_index in stage_old or cand.new_index in stage_new:
                raise ConsistencyError(
                    f"stage {stage} pairs page index twice: "
                    f"({cand.old_index}, {cand.new_index})"
                )
            stage_old.add(cand.old_index)
            stage_new.add(cand.new_index)
            if cand.old_index in self.used_old or cand.new_index in self.used_new:
                continue  # conflict with an earlier stage: drop the candidate
            self.used_old.add(cand.old_index)
            self.used_new.add(cand.new_index)
            self.matches.append(cand)


def integrate(blocks: list[AlignmentBlock], region_matches: list[RegionMatches],
              dp_results: list[RegionAlignment] | None,
              fps_old: list[PageFingerprint], fps_new: list[PageFingerprint],
              sim: SimilarityCache, cfg: PipelineConfig,
              use_visual_rematch: bool = True) -> MatchResult:
    """Merge stage outputs into the final mapping.

    dp_results None means the gap-scored stage did not run; provisional
    matches from the cascade are then accepted as they stand.
    """
    ledger = _Ledger()
    ledger.add_stage(
        [PageMatch(o, n, "ExactHash", 1.0, "LCS") for o, n in equal_pairs(blocks)],
        "lcs",
    )
    ledger.add_stage(
        [PageMatch(m.old_index, m.new_index, m.match_type, m.confidence, "SevenPhase")
         for rm in region_matches for m in rm.final],
        "seven-phase-final",
    )
    if dp_results is not None:
        ledger.add_stage(
            [PageMatch(p.old_index, p.new_index, p.match_type, p.confidence, "DP")
             for ra in dp_results for p in ra.pairs],
            "dp",
        )
    else:
        ledger.add_stage(
            [PageMatch(m.old_index, m.new_index, m.match_type, m.confidence, "SevenPhase")
             for rm in region_matches for m in rm.provisional],
            "seven-phase-provisional",
        )

    residual_old = [i for i in range(len(fps_old)) if i not in ledger.used_old]
    residual_new = [j for j in range(len(fps_new)) if j not in ledger.used_new]
    if use_visual_rematch:
        ledger.add_stage(
            [PageMatch(m.old_index, m.new_index, m.match_type, m.confidence, "SevenPhase")
             for m in visual_rematch(residual_old, residual_new, fps_old, fps_new, cfg.seven)],
            "visual-rematch",
        )
        residual_old = [i for i in residual_old if i not in ledger.used_old]
        residual_new = [j for j in residual_new if j not in ledger.used_new]

    deleted = [i for i in residual_old if not _no_signal(sim.norm_old[i], fps_old[i])]
    blank_old = [i for i in residual_old if _no_signal(sim.norm_old[i], fps_old[i])]
    inserted = [j for j in residual_new if not _no_signal(sim.norm_new[j], fps_new[j])]
    blank_new = [j for j in residual_new if _no_signal(sim.norm_new[j], fps_new[j])]

    ledger.matches.sort(key=lambda m: m.old_index)
    return MatchResult(matches=ledger.matches, inserted=inserted, deleted=deleted,
                       unmatched_blank_old=blank_old, unmatched_blank_new=blank_new)


def compare_bundles(old_bundle: DocumentBundle, new_bundle: DocumentBundle,
                    cfg: PipelineConfig | None = None, *,
                    use_seven_phase: bool = True, use_dp: bool = True,
                    use_visual_rematch: bool = True) -> MatchResult:
    """Run the full matching pipeline over two bundles.

    The keyword flags exist for ablation runs; defaults give the complete
    pipeline.
    """
    cfg = cfg or PipelineConfig()
    fps_old = fingerprint_pages(old_bundle.pages)
    fps_new = fingerprint_pages(new_bundle.pages)
    sim = SimilarityCache([p.text for p in old_bundle.pages],
                          [p.text for p in new_bundle.pages])
    blocks = sequence_blocks([fp.content_hash for fp in fps_old],
                             [fp.content_hash for fp in fps_new])
    anchors = equal_pairs(blocks)

    region_matches: list[RegionMatches] = []
    dp_results: list[RegionAlignment] | None = [] if use_dp else None
    for olo, ohi, nlo, nhi in replace_regions(blocks):
        region = Region(list(range(olo, ohi)), list(range(nlo, nhi)))
        if use_seven_phase:
            rm = run_seven_phase(region, fps_old, fps_new, sim, cfg.seven,
                                 anchors=anchors, include_visual=False)
        else:
            rm = RegionMatches([], [], region.old_indices, region.new_indices)
        region_matches.append(rm)
        if dp_results is None:
            continue
        final_old = {m.old_index for m in rm.final}
        final_new = {m.new_index for m in rm.final}
        dp_old = [i for i in region.old_indices
                  if i not in final_old and not _no_signal(sim.norm_old[i], fps_old[i])]
        dp_new = [j for j in region.new_indices
                  if j not in final_new and not _no_signal(sim.norm_new[j], fps_new[j])]
        if not dp_old or not dp_new:
            continue
        provisional = {(m.old_index, m.new_index): m.confidence for m in rm.provisional}
        dp_results.append(align_region(
            dp_old, dp_new, old_bundle.pages, new_bundle.pages,
            fps_old, fps_new, sim, cfg.dp, provisional=provisional,
        ))

    return integrate(blocks, region_matches, dp_results, fps_old, fps_new, sim, cfg,
                     use_visual_rematch=use_visual_rematch)


def patch_mode_match(old_bundle: DocumentBundle, new_bundle: DocumentBundle,
                     fps_old: list[PageFingerprint] | None = None,
                     fps_new: list[PageFingerprint] | None = None) -> MatchResult:
    """Lenient mapping for partial updates.

    Pages pair first by equal non-empty drawing number (confidence 0.95),
    then by exact content hash (1.0). Old pages without a partner are
    expected in a patch and reported as orphans, never as deleted.
    """
    fps_old = fps_old or fingerprint_pages(old_bundle.pages)
    fps_new = fps_new or fingerprint_pages(new_bundle.pages)
    matches: list[PageMatch] = []
    used_old: set[int] = set()
    used_new: set[int] = set()

    for attr, match_type, confidence in (("drawing_number", "DrawingNumber", 0.95),
                                         ("content_hash", "ExactHash", 1.0)):
        available: dict[str, list[int]] = {}
        for fp in fps_new:
            value = getattr(fp, attr)
            if value and fp.index not in used_new:
                available.setdefault(value, []).append(fp.index)
        for fp in fps_old:
            if fp.index in used_old:
                continue
            value = getattr(fp, attr)
            if not value:
                continue
            slot = available.get(value)
            if slot:
                partner = slot.pop(0)
                matches.append(PageMatch(fp.index, partner, match_type, confidence, "Patch"))
                used_old.add(fp.index)
                used_new.add(partner)

    orphans = [p.index for p in old_bundle.pages if p.index not in used_old]
    inserted = []
    blank_new = []
    for page in new_bundle.pages:
        if page.index in used_new:
            continue
        if _no_signal(normalize_text(page.text), fps_new[page.index]):
            blank_new.append(page.index)
        else:
            inserted.append(page.index)

    matches.sort(key=lambda m: m.old_index)
    return MatchResult(matches=matches, inserted=inserted, deleted=[], orphans=orphans,
                       unmatched_blank_new=blank_new)
