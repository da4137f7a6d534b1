"""Content stream interpretation: text runs and stroked/filled geometry.

The interpreter executes the operator subset that report generators emit
for text, tables, and simple line art: graphics state save/restore and
CTM concatenation, the text block operators, and straight-line path
construction with stroke or fill painting. Bezier segments are flattened
to their endpoints; colors, clipping, and external objects are ignored.
All recorded coordinates are in device space (PDF points, origin at the
bottom-left of the page).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import PdfReadError
from .pdf_reader import (
    Name,
    _parse_dict,
    _parse_hex_string,
    _parse_literal_string,
    _parse_number,
    _read_token,
    _skip_ws,
)

Matrix = tuple[float, float, float, float, float, float]
IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

# Estimated advance per character as a fraction of font size. Used both
# for run placement after Tj and for silhouette box widths; only rough
# proportions matter downstream.
CHAR_WIDTH_RATIO = 0.5

# A TJ kern adjustment beyond this many thousandths of an em reads as a
# deliberate gap between words.
TJ_SPACE_THRESHOLD = 100.0


@dataclass
class TextRun:
    """One shown string: baseline origin, effective font size, text."""

    x: float
    y: float
    size: float
    text: str


@dataclass
class Stroke:
    """One stroked line segment with its device-space width."""

    x0: float
    y0: float
    x1: float
    y1: float
    width: float


@dataclass
class FilledBox:
    """Bounding box of a filled path."""

    x0: float
    y0: float
    x1: float
    y1: float


@dataclass
class PageContent:
    runs: list[TextRun] = field(default_factory=list)
    strokes: list[Stroke] = field(default_factory=list)
    fills: list[FilledBox] = field(default_factory=list)


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    """Compose transforms: apply m first, then n."""
    ma, mb, mc, md, me, mf = m
    na, nb, nc, nd, ne, nf = n
    return (
        ma * na + mb * nc,
        ma * nb + mb * nd,
        mc * na + md * nc,
        mc * nb + md * nd,
        me * na + mf * nc + ne,
        me * nb + mf * nd + nf,
    )


def mat_apply(m: Matrix, x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return a * x + c * y + e, b * x + d * y + f


def _translate(tx: float, ty: float) -> Matrix:
    return (1.0, 0.0, 0.0, 1.0, tx, ty)


def _scale_of(m: Matrix) -> float:
    """Isotropic scale estimate: root of the absolute determinant."""
    return math.sqrt(abs(m[0] * m[3] - m[1] * m[2]))


def _tokenize(data: bytes):
    """Yield (kind, value) pairs: num, str, name, arr, dict, op."""
    i = 0
    n = len(data)
    while True:
        i = _skip_ws(data, i)
        if i >= n:
            return
        c = data[i]
        if c == 0x28:  # (
            value, i = _parse_literal_string(data, i)
            yield "str", value
        elif c == 0x3C:  # < or <<
            if i + 1 < n and data[i + 1] == 0x3C:
                value, i = _parse_dict(data, i)
                yield "dict", value
            else:
                value, i = _parse_hex_string(data, i)
                yield "str", value
        elif c == 0x5B:  # [
            value, i = _parse_tj_array(data, i)
            yield "arr", value
        elif c == 0x5D:  # stray ]
            i += 1
        elif c == 0x2F:  # /
            token, i = _read_token(data, i + 1)
            yield "name", Name(token.decode("latin-1"))
        elif c in b"+-." or 0x30 <= c <= 0x39:
            value, i = _parse_number(data, i)
            yield "num", value
        else:
            token, i = _read_token(data, i)
            yield "op", token.decode("latin-1")


def _parse_tj_array(data: bytes, i: int) -> tuple[list, int]:
    i += 1  # [
    out: list = []
    n = len(data)
    while True:
        i = _skip_ws(data, i)
        if i >= n:
            raise PdfReadError("unterminated array in content stream")
        c = data[i]
        if c == 0x5D:
            return out, i + 1
        if c == 0x28:
            value, i = _parse_literal_string(data, i)
            out.append(value)
        elif c == 0x3C:
            value, i = _parse_hex_string(data, i)
            out.append(value)
        else:
            value, i = _parse_number(data, i)
            out.append(value)


def _decode_text(raw: bytes) -> str:
    # WinAnsi tracks cp1252 closely enough for generated documents.
    return raw.decode("cp1252", errors="replace")


class _Interpreter:
    def __init__(self) -> None:
        self.out = PageContent()
        self.ctm: Matrix = IDENTITY
        self.line_width = 1.0
        self.gstack: list[tuple[Matrix, float]] = []
        self.tm: Matrix = IDENTITY
        self.tlm: Matrix = IDENTITY
        self.size = 0.0
        self.leading = 0.0
        self.segments: list[tuple[float, float, float, float]] = []
        self.points: list[tuple[float, float]] = []
        self.cur: tuple[float, float] | None = None
        self.start: tuple[float, float] | None = None

    # -- helpers -------------------------------------------------------

    def _num(self, args: list, k: int, op: str) -> list[float]:
        if len(args) < k:
            raise PdfReadError(f"operator {op} needs {k} operands")
        tail = args[-k:]
        try:
            return [float(v) for v in tail]
        except (TypeError, ValueError) as exc:
            raise PdfReadError(f"operator {op} got a non-numeric operand") from exc

    def _move(self, x: float, y: float) -> None:
        p = mat_apply(self.ctm, x, y)
        self.cur = p
        self.start = p
        self.points.append(p)

    def _line(self, x: float, y: float) -> None:
        p = mat_apply(self.ctm, x, y)
        if self.cur is not None and self.cur != p:
            self.segments.append((*self.cur, *p))
        self.cur = p
        self.points.append(p)

    def _close(self) -> None:
        if self.cur is not None and self.start is not None and self.cur != self.start:
            self.segments.append((*self.cur, *self.start))
            self.cur = self.start

    def _clear_path(self) -> None:
        self.segments = []
        self.points = []
        self.cur = None
        self.start = None

    def _stroke(self) -> None:
        width = max(self.line_width * _scale_of(self.ctm), 0.0)
        for x0, y0, x1, y1 in self.segments:
            self.out.strokes.append(Stroke(x0, y0, x1, y1, width))
        self._clear_path()

    def _fill(self) -> None:
        if self.points:
            xs = [p[0] for p in self.points]
            ys = [p[1] for p in self.points]
            self.out.fills.append(FilledBox(min(xs), min(ys), max(xs), max(ys)))
        self._clear_path()

    def _advance(self, text: str) -> None:
        width = CHAR_WIDTH_RATIO * self.size * len(text)
        self.tm = mat_mul(_translate(width, 0.0), self.tm)

    def _show(self, raw: bytes) -> None:
        text = _decode_text(raw)
        if text.strip():
            trm = mat_mul(self.tm, self.ctm)
            size = self.size * math.hypot(trm[2], trm[3])
            self.out.runs.append(TextRun(x=trm[4], y=trm[5], size=size, text=text))
        self._advance(text)

    def _next_line(self, tx: float, ty: float) -> None:
        self.tlm = mat_mul(_translate(tx, ty), self.tlm)
        self.tm = self.tlm

    # -- operator dispatch ----------------------------------------------

    def run(self, data: bytes) -> PageContent:
        args: list = []
        for kind, value in _tokenize(data):
            if kind != "op":
                args.append(value)
                continue
            self._execute(value, args)
            args = []
        return self.out

    def _execute(self, op: str, args: list) -> None:
        if op == "q":
            self.gstack.append((self.ctm, self.line_width))
        elif op == "Q":
            if self.gstack:
                self.ctm, self.line_width = self.gstack.pop()
        elif op == "cm":
            a, b, c, d, e, f = self._num(args, 6, op)
            self.ctm = mat_mul((a, b, c, d, e, f), self.ctm)
        elif op == "w":
            (self.line_width,) = self._num(args, 1, op)
        elif op == "BT":
            self.tm = IDENTITY
            self.tlm = IDENTITY
        elif op == "Tf":
            (self.size,) = self._num(args, 1, op)
        elif op == "TL":
            (self.leading,) = self._num(args, 1, op)
        elif op == "Td":
            tx, ty = self._num(args, 2, op)
            self._next_line(tx, ty)
        elif op == "TD":
            tx, ty = self._num(args, 2, op)
            self.leading = -ty
            self._next_line(tx, ty)
        elif op == "Tm":
            a, b, c, d, e, f = self._num(args, 6, op)
            self.tm = self.tlm = (a, b, c, d, e, f)
        elif op == "T*":
            self._next_line(0.0, -self.leading)
        elif op == "Tj":
            if not args or not isinstance(args[-1], bytes):
                raise PdfReadError("Tj needs a string operand")
            self._show(args[-1])
        elif op == "'":
            if not args or not isinstance(args[-1], bytes):
                raise PdfReadError("' needs a string operand")
            self._next_line(0.0, -self.leading)
            self._show(args[-1])
        elif op == '"':
            if not args or not isinstance(args[-1], bytes):
                raise PdfReadError('" needs a string operand')
            self._next_line(0.0, -self.leading)
            self._show(args[-1])
        elif op == "TJ":
            if not args or not isinstance(args[-1], list):
                raise PdfReadError("TJ needs an array operand")
            self._show_array(args[-1])
        elif op == "m":
            x, y = self._num(args, 2, op)
            self._move(x, y)
        elif op == "l":
            x, y = self._num(args, 2, op)
            self._line(x, y)
        elif op == "c":
            x, y = self._num(args, 6, op)[4:]
            self._line(x, y)
        elif op in ("v", "y"):
            x, y = self._num(args, 4, op)[2:]
            self._line(x, y)
        elif op == "h":
            self._close()
        elif op == "re":
            x, y, w, h = self._num(args, 4, op)
            self._move(x, y)
            self._line(x + w, y)
            self._line(x + w, y + h)
            self._line(x, y + h)
            self._close()
        elif op == "S":
            self._stroke()
        elif op == "s":
            self._close()
            self._stroke()
        elif op in ("f", "F", "f*"):
            self._fill()
        elif op in ("B", "B*", "b", "b*"):
            if op in ("b", "b*"):
                self._close()
            width = max(self.line_width * _scale_of(self.ctm), 0.0)
            for x0, y0, x1, y1 in self.segments:
                self.out.strokes.append(Stroke(x0, y0, x1, y1, width))
            self._fill()
        elif op == "n":
            self._clear_path()
        # Everything else (colors, line caps, clipping, markers, ET, Do,
        # spacing/rendering modes) has no effect on the extracted shapes.

    def _show_array(self, items: list) -> None:
        # Assemble the TJ array into one run anchored at the current origin.
        parts: list[str] = []
        for item in items:
            if isinstance(item, bytes):
                parts.append(_decode_text(item))
            elif isinstance(item, (int, float)):
                if -item > TJ_SPACE_THRESHOLD and parts and not parts[-1].endswith(" "):
                    parts.append(" ")
        text = "".join(parts)
        if text.strip():
            trm = mat_mul(self.tm, self.ctm)
            size = self.size * math.hypot(trm[2], trm[3])
            self.out.runs.append(TextRun(x=trm[4], y=trm[5], size=size, text=text))
        self._advance(text)


def interpret(data: bytes) -> PageContent:
    """Execute one page's content stream and collect text and geometry."""
    return _Interpreter().run(data)


def page_text(runs: list[TextRun], *, line_tolerance: float = 2.0) -> str:
    """Assemble runs into reading order: lines top to bottom, left to right.

    Runs whose baselines sit within line_tolerance points of a line's
    first (topmost) run join that line. Runs on a line are joined with
    single spaces.
    """
    ordered = sorted(runs, key=lambda r: (-r.y, r.x))
    lines: list[list[TextRun]] = []
    anchor_y = 0.0
    for run in ordered:
        if lines and abs(run.y - anchor_y) <= line_tolerance:
            lines[-1].append(run)
        else:
            lines.append([run])
            anchor_y = run.y
    parts = []
    for line in lines:
        line.sort(key=lambda r: r.x)
        parts.append(" ".join(run.text for run in line))
    return "\n".join(parts)
