"""Independent oracles and fixture generators shared across test modules.

Everything here re-derives expected results from first principles with its
own code paths (numpy sampling, brute-force enumeration, table-driven CRC)
so agreement with the package is evidence, not tautology.
"""

from __future__ import annotations

import math
import random

import numpy as np

from foldchain.geometry import TriCoord, LatticeEdge, neighbors

SQRT3 = math.sqrt(3.0)
ROW_H = SQRT3 / 2.0
TIE_EPS = 1e-9


# ------------------------------------------------------- independent offset

def offset_polyline_right(points, eps):
    """Shift a polyline sideways, to the right of its travel direction.

    Independent miter-join implementation used both to mirror the tie
    convention and to build explicit offset fixtures.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    segs = []
    for a, b in zip(pts, pts[1:]):
        d = b - a
        n = np.array([d[1], -d[0]])
        n = n / np.linalg.norm(n)
        segs.append((a + eps * n, b + eps * n, d))
    out = [segs[0][0]]
    for (a0, b0, d0), (a1, b1, d1) in zip(segs, segs[1:]):
        denom = d0[0] * d1[1] - d0[1] * d1[0]
        if abs(denom) <= 1e-12 * np.linalg.norm(d0) * np.linalg.norm(d1):
            out.append(b0)  # near-parallel: bevel
            out.append(a1)
        else:
            t = ((a1 - a0)[0] * d1[1] - (a1 - a0)[1] * d1[0]) / denom
            out.append(a0 + t * d0)
    out.append(segs[-1][1])
    return [tuple(p) for p in out]


# --------------------------------------------------- dense-sampling oracle

def _locate_many(xy: np.ndarray) -> np.ndarray:
    """Vectorized point location: rows of (q, r, up) per input point."""
    x, y = xy[:, 0], xy[:, 1]
    fa = y / ROW_H
    fb = x - y / SQRT3
    fc = x + y / SQRT3
    j = np.floor(fa).astype(np.int64)
    q = np.floor(fb).astype(np.int64)
    up = np.floor(fc).astype(np.int64) == q + j
    return np.stack([q, j, up.astype(np.int64)], axis=1)


def _cell_of(xy) -> tuple[int, int, bool]:
    row = _locate_many(np.asarray([xy], dtype=float))[0]
    return (int(row[0]), int(row[1]), bool(row[2]))


def _adjacent(c0, c1) -> bool:
    t0 = TriCoord(c0[0], c0[1], bool(c0[2]))
    return any(n == TriCoord(c1[0], c1[1], bool(c1[2])) for n in neighbors(t0))


def visited_cells(points_pitch_units, samples_per_pitch=1000):
    """Cell sequence a polyline visits, by dense sampling plus bisection.

    The polyline must already be in pitch units and already offset off all
    lattice vertices.  Consecutive samples landing in non-adjacent cells
    are refined by bisection until every transition is a single edge step.
    """
    pts = [np.asarray(p, dtype=float) for p in points_pitch_units]
    cells: list[tuple[int, int, bool]] = [_cell_of(pts[0])]
    for a, b in zip(pts, pts[1:]):
        length = float(np.linalg.norm(b - a))
        n = max(int(length * samples_per_pitch), 2)
        ts = np.linspace(0.0, 1.0, n + 1)
        xy = a[None, :] + ts[:, None] * (b - a)[None, :]
        rows = _locate_many(xy)
        change = np.nonzero(np.any(rows[1:] != rows[:-1], axis=1))[0]
        for idx in change:
            t0, t1 = ts[idx], ts[idx + 1]
            c0 = (int(rows[idx][0]), int(rows[idx][1]), bool(rows[idx][2]))
            c1 = (int(rows[idx + 1][0]), int(rows[idx + 1][1]), bool(rows[idx + 1][2]))
            _extend_with_transition(cells, a, b, t0, t1, c0, c1)
    return cells


def _extend_with_transition(cells, a, b, t0, t1, c0, c1, depth=0):
    # cells[-1] should be c0 already (it is, between consecutive changes)
    if c1 == cells[-1]:
        return
    if _adjacent(cells[-1], c1):
        cells.append(c1)
        return
    if depth > 60:
        raise AssertionError(f"bisection failed between {cells[-1]} and {c1}")
    tm = (t0 + t1) / 2.0
    pm = a + tm * (b - a)
    cm = _cell_of(pm)
    _extend_with_transition(cells, a, b, t0, tm, c0, cm, depth + 1)
    _extend_with_transition(cells, a, b, tm, t1, cm, c1, depth + 1)


def cancel_backtracks(cells):
    """Collapse A-B-A excursions (stack semantics, cascading)."""
    stack: list = []
    for c in cells:
        if len(stack) >= 2 and stack[-2] == c:
            stack.pop()
        else:
            stack.append(c)
    return stack


def oracle_strip_cells(curve_points_mm, pitch_mm, samples_per_pitch=1000):
    """Expected strip cells for a curve, from the sampling oracle.

    Normalizes to topmost-first, applies the right-of-travel tie offset,
    walks the dense sampling, cancels backtracks, and drops the two end
    cells (the chain realizes only fully-traversed triangles).
    """
    pts = [(x / pitch_mm, y / pitch_mm) for x, y in curve_points_mm]
    pts = normalize_topmost(pts)
    pts = offset_polyline_right(pts, TIE_EPS)
    cells = cancel_backtracks(visited_cells(pts, samples_per_pitch))
    if len(cells) < 3:
        return []
    return [TriCoord(q, r, bool(up)) for q, r, up in cells[1:-1]]


def normalize_topmost(points):
    """Topmost point first (ties: leftmost); interior topmost keeps the
    longer branch.  Mirrors the documented normalization convention."""
    best = max(range(len(points)), key=lambda i: (points[i][1], -points[i][0]))
    if best == 0:
        return list(points)
    if best == len(points) - 1:
        return list(points[::-1])

    def arc(pts):
        return sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))

    prefix = points[: best + 1][::-1]
    suffix = points[best:]
    return list(suffix) if arc(suffix) >= arc(prefix) else list(prefix)


# ----------------------------------------------- brute-force edge oracle

def oracle_crossing_edges(curve_points_mm, pitch_mm):
    """Edge-crossing sequence by brute force: enumerate candidate edges in
    the bounding box and intersect each against each polyline segment."""
    pts = [(x / pitch_mm, y / pitch_mm) for x, y in curve_points_mm]
    pts = normalize_topmost(pts)
    pts = offset_polyline_right(pts, TIE_EPS)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    j_lo = math.floor(min(ys) / ROW_H) - 3
    j_hi = math.ceil(max(ys) / ROW_H) + 3
    edges = []
    for j in range(j_lo, j_hi + 1):
        # vertex key k sits at plane x = k + j/2, so the k window that
        # covers the bounding box shifts with the row
        k_lo = math.floor(min(xs) - 0.5 * j) - 4
        k_hi = math.ceil(max(xs) - 0.5 * j) + 4
        for k in range(k_lo, k_hi + 1):
            for delta in ((1, 0), (0, 1), (1, -1)):
                b = (k + delta[0], j + delta[1])
                edges.append(LatticeEdge((k, j), b))
    vx = lambda v: (v[0] + 0.5 * v[1], v[1] * ROW_H)

    def cross(o, d, p):
        return d[0] * (p[1] - o[1]) - d[1] * (p[0] - o[0])

    hits = []
    s_base = 0.0
    for a, b in zip(pts, pts[1:]):
        d = (b[0] - a[0], b[1] - a[1])
        seg_hits = []
        for edge in edges:
            pa, pb = vx(edge.a), vx(edge.b)
            sa, sb = cross(a, d, pa), cross(a, d, pb)
            if (sa > 0) == (sb > 0):
                continue
            # intersection parameter along the polyline segment
            e = (pb[0] - pa[0], pb[1] - pa[1])
            denom = d[0] * e[1] - d[1] * e[0]
            if denom == 0:
                continue
            t = ((pa[0] - a[0]) * e[1] - (pa[1] - a[1]) * e[0]) / denom
            if 0.0 <= t < 1.0:
                seg_hits.append((t, edge))
        seg_hits.sort(key=lambda h: h[0])
        seg_len = math.hypot(*d)
        hits.extend((s_base + t * seg_len, edge) for t, edge in seg_hits)
        s_base += seg_len
    # cancel immediate same-edge pairs, cascading
    stack = []
    for h in hits:
        if stack and stack[-1][1] == h[1]:
            stack.pop()
        else:
            stack.append(h)
    return [edge for _s, edge in stack]


# ----------------------------------------------------------- CRC-8 oracle

_CRC_TABLE = []
for _byte in range(256):
    _crc = _byte
    for _ in range(8):
        _crc = (_crc >> 1) ^ 0x8C if _crc & 1 else _crc >> 1
    _CRC_TABLE.append(_crc)


def crc8_table(data: bytes) -> int:
    """Table-driven CRC over the same reflected polynomial."""
    crc = 0
    for byte in data:
        crc = _CRC_TABLE[crc ^ byte]
    return crc


# ------------------------------------------------------ curve generators

def random_simple_polyline(rng: random.Random, max_folds=100):
    """Random non-self-intersecting polyline at desk scale (pitch units).

    Rejection sampling; returns a list of (x, y) tuples acceptable to the
    curve constructor.
    """
    from foldchain.geometry import Curve
    from foldchain.errors import SelfIntersection

    while True:
        n = rng.randint(2, 8)
        span = rng.uniform(3.0, 18.0)
        pts = []
        x, y = rng.uniform(-5, 5), rng.uniform(-5, 5)
        for _ in range(n):
            pts.append((round(x, 4), round(y, 4)))
            step = rng.uniform(0.8, span / 2)
            ang = rng.uniform(0, 2 * math.pi)
            x += step * math.cos(ang)
            y += step * math.sin(ang)
        try:
            curve = Curve(pts)
        except (SelfIntersection, ValueError):
            continue
        if curve.arc_length() / 1.0 > max_folds * 0.45:
            continue  # keep fold counts in the requested range
        return pts
