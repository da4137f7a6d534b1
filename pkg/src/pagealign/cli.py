"""Command-line entry point.

Commands:
  compare <old> <new> --out DIR [--mode full|patch] [threshold flags]
  eval <old> <new> --gt FILE [--variant V]
  fingerprint <bundle>

Exit codes: 0 success, 1 input/validation error, 2 internal error.
PAGEALIGN_THREADS caps worker threads (0 or unset = one per CPU).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import cv2

from . import __version__
from .bundle import BundleError, DocumentBundle, load_bundle, load_ground_truth
from .consensus import MatchResult, PipelineConfig, compare_bundles, patch_mode_match
from .diff_engine import DiffConfig, PairDiff, diff_pair
from .dp_align import DpConfig
from .evaluation import VARIANTS, IndexOutOfRange, compute_prf, metrics_json, run_variant
from .fingerprint import fingerprint_pages
from .report import build_report, emit_html, render_side_by_side, report_to_json
from .seven_phase import SevenPhaseConfig


def max_threads() -> int:
    raw = os.environ.get("PAGEALIGN_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _add_threshold_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("matching thresholds")
    group.add_argument("--tau-s", type=float, default=0.5,
                       help="text-similarity acceptance threshold")
    group.add_argument("--shift-fraction", type=float, default=0.30,
                       help="vote fraction for page-shift detection")
    group.add_argument("--shift-min-votes", type=int, default=2)
    group.add_argument("--adjacency-max-d", type=int, default=3)
    group.add_argument("--adjacency-accept", type=float, default=0.3)
    group.add_argument("--phash-accept", type=float, default=0.45,
                       help="perceptual-hash similarity acceptance")
    group.add_argument("--gap-penalty", type=float, default=-0.42)
    group.add_argument("--content-similar", type=float, default=0.28,
                       help="pair-score threshold for the ContentSimilar class")
    group.add_argument("--position-cap", type=float, default=0.60,
                       help="confidence cap for PositionMatch pairs")
    diff = parser.add_argument_group("diff tunables")
    diff.add_argument("--text-limit", type=int, default=5000)
    diff.add_argument("--pixel-threshold", type=int, default=32)
    diff.add_argument("--min-region-area", type=int, default=25)
    diff.add_argument("--merge-margin", type=int, default=5)


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        seven=SevenPhaseConfig(
            tau_s=args.tau_s,
            shift_fraction=args.shift_fraction,
            shift_min_votes=args.shift_min_votes,
            adjacency_max_d=args.adjacency_max_d,
            adjacency_accept=args.adjacency_accept,
            phash_accept=args.phash_accept,
        ),
        dp=DpConfig(
            gap_penalty=args.gap_penalty,
            content_similar_threshold=args.content_similar,
            position_match_cap=args.position_cap,
        ),
    )


def _diff_config(args: argparse.Namespace) -> DiffConfig:
    return DiffConfig(
        text_limit=args.text_limit,
        pixel_threshold=args.pixel_threshold,
        min_region_area=args.min_region_area,
        merge_margin=args.merge_margin,
    )


def _config_snapshot(args: argparse.Namespace, mode: str) -> dict:
    return {
        "mode": mode,
        "tau_s": args.tau_s,
        "shift_fraction": args.shift_fraction,
        "shift_min_votes": args.shift_min_votes,
        "adjacency_max_d": args.adjacency_max_d,
        "adjacency_accept": args.adjacency_accept,
        "phash_accept": args.phash_accept,
        "gap_penalty": args.gap_penalty,
        "content_similar_threshold": args.content_similar,
        "position_match_cap": args.position_cap,
        "text_limit": args.text_limit,
        "pixel_threshold": args.pixel_threshold,
        "min_region_area": args.min_region_area,
        "merge_margin": args.merge_margin,
    }


def _diff_matched_pairs(old_bundle: DocumentBundle, new_bundle: DocumentBundle,
                        result: MatchResult, cfg: DiffConfig) -> list[PairDiff]:
    pairs = [(old_bundle.pages[m.old_index], new_bundle.pages[m.new_index])
             for m in result.matches]
    workers = min(max_threads(), max(1, len(pairs)))
    if workers <= 1 or len(pairs) <= 1:
        return [diff_pair(o, n, cfg) for o, n in pairs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: diff_pair(p[0], p[1], cfg), pairs))


def cmd_compare(args: argparse.Namespace) -> int:
    old_bundle = load_bundle(args.old)
    new_bundle = load_bundle(args.new)
    pipeline_cfg = _pipeline_config(args)
    diff_cfg = _diff_config(args)

    if args.mode == "patch":
        result = patch_mode_match(old_bundle, new_bundle)
    else:
        result = compare_bundles(old_bundle, new_bundle, pipeline_cfg)

    pair_diffs = _diff_matched_pairs(old_bundle, new_bundle, result, diff_cfg)
    report = build_report(result, pair_diffs, _config_snapshot(args, args.mode),
                          old_bundle.doc_id, new_bundle.doc_id, args.mode, __version__)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report_to_json(report), encoding="utf-8")

    composites: dict[tuple[int, int], str] = {}
    comp_dir = out / "composites"
    for diff in pair_diffs:
        old_page = old_bundle.pages[diff.old_index]
        new_page = new_bundle.pages[diff.new_index]
        if old_page.raster_high is None or new_page.raster_high is None:
            continue
        comp_dir.mkdir(exist_ok=True)
        rel = f"composites/pair_{diff.old_index:04d}_{diff.new_index:04d}.png"
        image = render_side_by_side(diff, old_page.raster_high, new_page.raster_high)
        if not cv2.imwrite(str(out / rel), image):
            raise OSError(f"could not write composite {rel}")
        composites[(diff.old_index, diff.new_index)] = rel

    emit_html(report, composites, out)
    meta = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "old_bundle": str(args.old),
        "new_bundle": str(args.new),
        "engine_version": __version__,
    }
    (out / "run_meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"report written to {out / 'report.json'}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    old_bundle = load_bundle(args.old)
    new_bundle = load_bundle(args.new)
    gt = load_ground_truth(args.gt)
    result = run_variant(old_bundle, new_bundle, args.variant, _pipeline_config(args))
    metrics = compute_prf(result, gt, old_page_count=len(old_bundle.pages),
                          new_page_count=len(new_bundle.pages))
    print(json.dumps(metrics_json(args.variant, metrics)))
    return 0


def cmd_fingerprint(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    for fp in fingerprint_pages(bundle.pages):
        line = {
            "index": fp.index,
            "content_hash": fp.content_hash,
            "drawing_number": fp.drawing_number,
            "section_title": fp.section_title,
            "phash": f"{fp.phash:016x}" if fp.phash is not None else None,
        }
        print(json.dumps(line, ensure_ascii=False))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pagealign",
        description="Align and diff the pages of two document revisions.",
    )
    parser.add_argument("--version", action="version", version=f"pagealign {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    compare = sub.add_parser("compare", help="match two bundles and write a diff report")
    compare.add_argument("old", help="old bundle directory")
    compare.add_argument("new", help="new bundle directory")
    compare.add_argument("--out", required=True, help="output directory")
    compare.add_argument("--mode", choices=("full", "patch"), default="full")
    _add_threshold_flags(compare)
    compare.set_defaults(func=cmd_compare)

    evaluate = sub.add_parser("eval", help="score a variant against ground truth")
    evaluate.add_argument("old")
    evaluate.add_argument("new")
    evaluate.add_argument("--gt", required=True, help="ground-truth JSON file")
    evaluate.add_argument("--variant", choices=VARIANTS, default="full")
    _add_threshold_flags(evaluate)
    evaluate.set_defaults(func=cmd_eval)

    fingerprint = sub.add_parser("fingerprint", help="print per-page fingerprints")
    fingerprint.add_argument("bundle")
    fingerprint.set_defaults(func=cmd_fingerprint)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BundleError, IndexOutOfRange, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
