"""Ruling-line table detection.

A table is recognized as a connected lattice of horizontal and vertical
stroked segments enclosing at least two cells. Diagonals never join a
lattice, and a lone stroked rectangle (one cell) is treated as a frame,
not a table. Cell text is assigned by baseline origin.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .content import PageContent, TextRun

AXIS_TOL = 0.5      # max drift for a segment to count as axis-aligned
JOIN_TOL = 1.0      # how close a crossing must be to connect two segments
CLUSTER_TOL = 1.0   # boundary positions within this merge into one rule
MIN_CELLS = 2


@dataclass
class _Seg:
    horizontal: bool
    pos: float   # y for horizontal, x for vertical
    lo: float    # extent start along the segment's axis
    hi: float


def _axis_segments(content: PageContent) -> list[_Seg]:
    out: list[_Seg] = []
    for s in content.strokes:
        if abs(s.y1 - s.y0) <= AXIS_TOL and abs(s.x1 - s.x0) > AXIS_TOL:
            out.append(_Seg(True, (s.y0 + s.y1) / 2.0,
                            min(s.x0, s.x1), max(s.x0, s.x1)))
        elif abs(s.x1 - s.x0) <= AXIS_TOL and abs(s.y1 - s.y0) > AXIS_TOL:
            out.append(_Seg(False, (s.x0 + s.x1) / 2.0,
                            min(s.y0, s.y1), max(s.y0, s.y1)))
    return out


def _crosses(h: _Seg, v: _Seg) -> bool:
    return (h.lo - JOIN_TOL <= v.pos <= h.hi + JOIN_TOL
            and v.lo - JOIN_TOL <= h.pos <= v.hi + JOIN_TOL)


def _components(segs: list[_Seg]) -> list[list[_Seg]]:
    parent = list(range(len(segs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, a in enumerate(segs):
        for j in range(i + 1, len(segs)):
            b = segs[j]
            if a.horizontal == b.horizontal:
                continue
            h, v = (a, b) if a.horizontal else (b, a)
            if _crosses(h, v):
                parent[find(i)] = find(j)

    groups: dict[int, list[_Seg]] = {}
    for i, seg in enumerate(segs):
        groups.setdefault(find(i), []).append(seg)
    return list(groups.values())


def _cluster(values: list[float]) -> list[float]:
    """Merge nearby positions; each cluster is represented by its first value."""
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > CLUSTER_TOL:
            out.append(v)
    return out


def detect_tables(content: PageContent) -> list[list[list[str]]]:
    """Return detected tables as row-major cell grids, top table first."""
    segs = _axis_segments(content)
    grids: list[tuple[float, float, list[list[str]]]] = []
    for comp in _components(segs):
        h = [s for s in comp if s.horizontal]
        v = [s for s in comp if not s.horizontal]
        if len(h) < 2 or len(v) < 2:
            continue
        ys = _cluster([s.pos for s in h])
        xs = _cluster([s.pos for s in v])
        rows = len(ys) - 1
        cols = len(xs) - 1
        if rows < 1 or cols < 1 or rows * cols < MIN_CELLS:
            continue
        grid = _fill_grid(xs, ys, content.runs)
        grids.append((-max(ys), min(xs), grid))
    grids.sort(key=lambda g: (g[0], g[1]))
    return [g[2] for g in grids]


def _fill_grid(xs: list[float], ys: list[float],
               runs: list[TextRun]) -> list[list[str]]:
    rows = len(ys) - 1
    cols = len(xs) - 1
    cells: list[list[list[TextRun]]] = [
        [[] for _ in range(cols)] for _ in range(rows)
    ]
    top = ys[-1]
    for run in runs:
        if not (xs[0] <= run.x <= xs[-1] and ys[0] <= run.y <= top):
            continue
        c = min(bisect_right(xs, run.x) - 1, cols - 1)
        # ys ascends; row 0 is the top band
        band = min(bisect_right(ys, run.y) - 1, rows - 1)
        r = rows - 1 - band
        cells[r][c].append(run)
    grid: list[list[str]] = []
    for row in cells:
        line: list[str] = []
        for bucket in row:
            bucket.sort(key=lambda t: (-t.y, t.x))
            line.append(" ".join(t.text for t in bucket).strip())
        grid.append(line)
    return grid
