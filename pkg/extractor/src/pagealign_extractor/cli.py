"""Command-line entry point.

Usage: pagealign-extract <pdf> --out DIR [--no-tables] [--high-dpi N]

Exit codes: 0 success, 1 input/validation error, 2 internal error.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import ExtractorError
from .extract import ExtractionConfig, extract_pdf


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pagealign-extract",
        description="Extract a PDF into a page bundle directory.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("pdf", help="path to the PDF file")
    parser.add_argument("--out", required=True, metavar="DIR",
                        help="bundle output directory")
    parser.add_argument("--no-tables", action="store_true",
                        help="skip table detection")
    parser.add_argument("--high-dpi", type=int, default=150, metavar="N",
                        help="resolution of the high raster (default 150)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExtractionConfig(
            high_dpi=args.high_dpi,
            table_detection=not args.no_tables,
        )
        out = extract_pdf(args.pdf, args.out, config)
    except (ExtractorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
