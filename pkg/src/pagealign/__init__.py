"""Page-level alignment and diffing for revised multi-page document sets."""
from __future__ import annotations

__version__ = "0.1.0"

from .bundle import (
    BundleError,
    DocumentBundle,
    DuplicateIndexError,
    GroundTruth,
    IndexGapError,
    MissingManifest,
    PageRecord,
    RasterDimensionError,
    SchemaViolation,
    TableGrid,
    load_bundle,
    load_ground_truth,
    save_bundle,
)
from .consensus import (
    ConsistencyError,
    MatchResult,
    PageMatch,
    PipelineConfig,
    compare_bundles,
    patch_mode_match,
)
from .diff_engine import DiffConfig, PairDiff, RasterMissing, diff_pair
from .dp_align import DpConfig
from .evaluation import EvalMetrics, IndexOutOfRange, compute_prf, run_variant
from .fingerprint import PageFingerprint, fingerprint_page, fingerprint_pages
from .seven_phase import SevenPhaseConfig

__all__ = [
    "__version__",
    "BundleError",
    "ConsistencyError",
    "DiffConfig",
    "DocumentBundle",
    "DpConfig",
    "DuplicateIndexError",
    "EvalMetrics",
    "GroundTruth",
    "IndexGapError",
    "IndexOutOfRange",
    "MatchResult",
    "MissingManifest",
    "PageFingerprint",
    "PageMatch",
    "PageRecord",
    "PairDiff",
    "PipelineConfig",
    "RasterDimensionError",
    "RasterMissing",
    "SchemaViolation",
    "SevenPhaseConfig",
    "TableGrid",
    "compare_bundles",
    "compute_prf",
    "diff_pair",
    "fingerprint_page",
    "fingerprint_pages",
    "load_bundle",
    "load_ground_truth",
    "patch_mode_match",
    "run_variant",
    "save_bundle",
]
