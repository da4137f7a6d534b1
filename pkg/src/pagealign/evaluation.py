"""Scoring against ground truth, plus the ablation variants.

Precision and recall are computed over exact matched pairs: a predicted
(old, new) pair is a true positive only if the ground truth contains the
identical pair. Matching a page to the wrong counterpart therefore costs
both a false positive and a false negative.
"""
from __future__ import annotations

from dataclasses import dataclass

from .bundle import DocumentBundle, GroundTruth
from .consensus import MatchResult, PageMatch, PipelineConfig, compare_bundles

VARIANTS = ("sequential", "lcs_only", "seven_phase_only", "full")


class IndexOutOfRange(Exception):
    """A predicted or reference index lies outside the bundle bounds."""


@dataclass
class EvalMetrics:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


def _check_bounds(pairs: list[tuple[int, int]], singles_old: list[int],
                  singles_new: list[int], old_count: int | None,
                  new_count: int | None) -> None:
    def bad(idx: int, count: int | None) -> bool:
        return idx < 0 or (count is not None and idx >= count)

    for o, n in pairs:
        if bad(o, old_count) or bad(n, new_count):
            raise IndexOutOfRange(f"pair ({o}, {n}) outside page bounds")
    for o in singles_old:
        if bad(o, old_count):
            raise IndexOutOfRange(f"old index {o} outside page bounds")
    for n in singles_new:
        if bad(n, new_count):
            raise IndexOutOfRange(f"new index {n} outside page bounds")


def compute_prf(predicted: MatchResult, gt: GroundTruth,
                old_page_count: int | None = None,
                new_page_count: int | None = None) -> EvalMetrics:
    """Pair-exact precision/recall/F1 of predicted matches against gt.

    Page counts, when given, bound-check every index that appears.
    """
    pred_pairs = [(m.old_index, m.new_index) for m in predicted.matches]
    _check_bounds(pred_pairs, predicted.deleted, predicted.inserted,
                  old_page_count, new_page_count)
    _check_bounds(gt.matches, gt.deleted, gt.inserted, old_page_count, new_page_count)

    pred = set(pred_pairs)
    ref = set(gt.matches)
    tp = len(pred & ref)
    fp = len(pred - ref)
    fn = len(ref - pred)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalMetrics(tp=tp, fp=fp, fn=fn, precision=precision, recall=recall, f1=f1)


def sequential_baseline(old_count: int, new_count: int) -> MatchResult:
    """Naive order baseline: page i pairs with page i, surplus classified."""
    k = min(old_count, new_count)
    matches = [PageMatch(i, i, "PositionMatch", 0.5, "Sequential") for i in range(k)]
    return MatchResult(matches=matches,
                       inserted=list(range(k, new_count)),
                       deleted=list(range(k, old_count)))


def run_variant(old_bundle: DocumentBundle, new_bundle: DocumentBundle,
                variant: str, cfg: PipelineConfig | None = None) -> MatchResult:
    """Run one pipeline ablation.

    sequential: positional pairing only. lcs_only: equal hash blocks only,
    everything else residual. seven_phase_only: region cascade without the
    gap-scored arbitration (its provisional matches stand). full: the whole
    pipeline.
    """
    if variant == "sequential":
        return sequential_baseline(len(old_bundle.pages), len(new_bundle.pages))
    toggles = {
        "lcs_only": dict(use_seven_phase=False, use_dp=False, use_visual_rematch=False),
        "seven_phase_only": dict(use_seven_phase=True, use_dp=False,
                                 use_visual_rematch=True),
        "full": dict(use_seven_phase=True, use_dp=True, use_visual_rematch=True),
    }
    if variant not in toggles:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return compare_bundles(old_bundle, new_bundle, cfg, **toggles[variant])


def metrics_json(variant: str, metrics: EvalMetrics) -> dict:
    """The metrics payload the CLI prints."""
    return {
        "variant": variant,
        "tp": metrics.tp,
        "fp": metrics.fp,
        "fn": metrics.fn,
        "precision": round(metrics.precision, 4),
        "recall": round(metrics.recall, 4),
        "f1": round(metrics.f1, 4),
    }
