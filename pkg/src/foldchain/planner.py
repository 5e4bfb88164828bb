"""Fold planning: turn a planar curve into a lattice walk and fold plan.

The planner walks the curve through the triangular lattice, records the
ordered sequence of lattice-edge crossings, removes pairs of consecutive
crossings of one and the same edge (the curve only dipped into a cell and
left the way it came, so that cell is skipped), and emits one fold per cell
that is genuinely entered through one edge and left through another.

Degeneracies (curve points or crossings exactly on a lattice vertex) are
resolved by shifting the whole polyline sideways by ``TIE_EPS * pitch`` to
the right of the walking direction before any intersection test.  The shift
is far above double rounding noise and far below anything a curve can
meaningfully encode, so generic inputs are unaffected while exact vertex
hits become well defined.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import AnchorMismatch, ChainTooShort, EmptyPlan, NotCoTriangular
from .geometry import (
    ROW_HEIGHT,
    SQRT3,
    TIE_EPS,
    AnchorPose,
    ChainGeometry,
    Curve,
    FoldDirection,
    LatticeEdge,
    Point,
    StripElement,
    TriangleStrip,
    common_triangle,
    shared_corner,
    vertex_xy,
)


class TruncatedBranchWarning(UserWarning):
    """The curve's topmost point was interior; only one branch is planned."""


@dataclass(frozen=True)
class EdgeCrossing:
    """One crossing of a lattice edge: where, and how far along the curve."""

    edge: LatticeEdge
    point: Point  # plane units
    s: float      # arc length from the curve start, plane units


@dataclass(frozen=True)
class FoldPlan:
    """Ordered fold directions, one per particle, plus the anchor pose."""

    directions: tuple[FoldDirection, ...]
    anchor: AnchorPose

    def __len__(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class PlanResult:
    """plan_curve output: the fold plan and the strip it realizes."""

    plan: FoldPlan
    strip: TriangleStrip


# --------------------------------------------------------------------------
# normalization


def normalize_curve(curve: Curve) -> Curve:
    """Reorient the curve to start at its topmost point.

    Topmost means maximum y, ties broken by minimum x; for a polyline this
    is always attained at a point of the polyline.  If that point is the
    first one the curve is returned unchanged, if it is the last the curve
    is reversed.  An interior topmost point splits the curve into two
    hanging branches; only the longer one (by arc length) is kept and a
    TruncatedBranchWarning reports the split.
    """
    pts = curve.points
    top = max(range(len(pts)), key=lambda i: (pts[i][1], -pts[i][0]))
    if top == 0:
        return curve
    if top == len(pts) - 1:
        return curve.reversed()

    down = Curve(pts[top:])
    up = Curve(tuple(reversed(pts[: top + 1])))
    keep, drop = (down, up) if down.arc_length() >= up.arc_length() else (up, down)
    warnings.warn(
        "topmost point is interior: keeping the longer branch "
        f"({keep.arc_length():.6g} over {drop.arc_length():.6g} length units)",
        TruncatedBranchWarning,
        stacklevel=2,
    )
    return keep


# --------------------------------------------------------------------------
# right offset


def _offset_right(points: Sequence[Point], eps: float) -> list[Point]:
    """Parallel-offset an open polyline by ``eps`` to the right of travel.

    Interior joints use the miter point of the two offset segments; joints
    too sharp for a stable miter fall back to a bevel (both offset points).
    """
    offs: list[tuple[Point, Point]] = []
    for i in range(len(points) - 1):
        (x0, y0), (x1, y1) = points[i], points[i + 1]
        dx, dy = x1 - x0, y1 - y0
        norm = math.hypot(dx, dy)
        nx, ny = dy / norm * eps, -dx / norm * eps  # right normal
        offs.append(((x0 + nx, y0 + ny), (x1 + nx, y1 + ny)))

    out: list[Point] = [offs[0][0]]
    for i in range(len(offs) - 1):
        (a0, a1), (b0, b1) = offs[i], offs[i + 1]
        da = (a1[0] - a0[0], a1[1] - a0[1])
        db = (b1[0] - b0[0], b1[1] - b0[1])
        denom = da[0] * db[1] - da[1] * db[0]
        if abs(denom) > 1e-12 * math.hypot(*da) * math.hypot(*db):
            t = ((b0[0] - a0[0]) * db[1] - (b0[1] - a0[1]) * db[0]) / denom
            out.append((a0[0] + t * da[0], a0[1] + t * da[1]))
        else:
            out.append(a1)
            if b0 != a1:
                out.append(b0)
    out.append(offs[-1][1])
    return out


# --------------------------------------------------------------------------
# crossing extraction


def _row_of(y: float) -> int:
    return math.floor(y / ROW_HEIGHT)


def _edge_for_crossing(family: int, n: int, pos: Point) -> LatticeEdge:
    """Lattice edge met when crossing integer line ``n`` of a family.

    Families: 0 horizontal (y = n*ROW_HEIGHT), 1 leaning +60 degrees
    (x - y/sqrt3 = n), 2 leaning +120 degrees (x + y/sqrt3 = n).
    Coordinates are in pitch units.
    """
    if family == 0:
        k = math.floor(pos[0] - 0.5 * n)
        return LatticeEdge((k, n), (k + 1, n))
    j = _row_of(pos[1])
    if family == 1:
        return LatticeEdge((n, j), (n, j + 1))
    return LatticeEdge((n - j, j), (n - j - 1, j + 1))


def _families(p: Point) -> tuple[float, float, float]:
    x, y = p
    return (y / ROW_HEIGHT, x - y / SQRT3, x + y / SQRT3)


def crossing_sequence(curve: Curve, pitch: float) -> list[EdgeCrossing]:
    """Ordered lattice-edge crossings of the curve, dips cancelled.

    The curve should already be normalized (plan_curve takes care of that).
    Consecutive crossings of one identical edge annihilate pairwise: the
    cell between them is only grazed, not traversed, and contributes no
    particle.  Returned arc-length parameters are strictly increasing.
    """
    if pitch <= 0:
        raise ValueError("pitch must be positive")
    pts = [(x / pitch, y / pitch) for x, y in curve.points]
    pts = _offset_right(pts, TIE_EPS)

    raw: list[EdgeCrossing] = []
    s_base = 0.0
    for i in range(len(pts) - 1):
        p0, p1 = pts[i], pts[i + 1]
        seg_len = math.dist(p0, p1)
        if seg_len == 0.0:
            continue
        f0 = _families(p0)
        f1 = _families(p1)
        hits: list[tuple[float, int, int]] = []
        for fam in range(3):
            a, b = f0[fam], f1[fam]
            lo, hi = (a, b) if a <= b else (b, a)
            for n in range(math.floor(lo) + 1, math.floor(hi) + 1):
                # crossing of level n: the endpoints sit on opposite sides
                if (a < n) == (b < n):
                    continue
                t = (n - a) / (b - a)
                hits.append((t, fam, n))
        hits.sort()
        for t, fam, n in hits:
            pos = (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))
            edge = _edge_for_crossing(fam, n, pos)
            raw.append(
                EdgeCrossing(
                    edge=edge,
                    point=(pos[0] * pitch, pos[1] * pitch),
                    s=(s_base + t * seg_len) * pitch,
                )
            )
        s_base += seg_len

    # cancel same-edge pairs: a cell entered and left through one edge is
    # not part of the walk, and the cancellation may cascade
    stack: list[EdgeCrossing] = []
    for c in raw:
        if stack and stack[-1].edge == c.edge:
            stack.pop()
        else:
            stack.append(c)
    return stack


# --------------------------------------------------------------------------
# fold direction


def fold_direction(
    entry: LatticeEdge,
    exit: LatticeEdge,
    walk_direction: Point,
) -> FoldDirection:
    """Fold realized by entering through ``entry`` and leaving via ``exit``.

    The shared corner of the two edges is classified against the line
    through the entry-edge midpoint with direction ``walk_direction``:
    strictly left means Left, anything else (including exactly on the
    line) means Right, matching the planner's right-offset convention.
    """
    if entry == exit:
        raise NotCoTriangular("entry and exit are the same edge")
    if common_triangle(entry, exit) is None:
        raise NotCoTriangular(f"edges {entry} and {exit} share no cell")
    corner = shared_corner(entry, exit)
    assert corner is not None
    mx, my = entry.midpoint(1.0)
    cx, cy = vertex_xy(corner, 1.0)
    side = walk_direction[0] * (cy - my) - walk_direction[1] * (cx - mx)
    return FoldDirection.LEFT if side > 0 else FoldDirection.RIGHT


# --------------------------------------------------------------------------
# planning


def plan_curve(
    curve: Curve,
    pitch: float,
    anchor: Union[AnchorPose, str, None] = "auto",
    chain: Union[ChainGeometry, int, None] = None,
) -> PlanResult:
    """Plan the chain folds that approximate ``curve`` on a pitch lattice.

    The curve is normalized to hang from its topmost point, the lattice
    crossings are collected, and every cell traversed between two distinct
    edges becomes one particle with a Left/Right fold.  ``anchor`` is
    normally ``"auto"`` (first traversed cell); passing an explicit
    AnchorPose asserts that the plan starts there and raises
    AnchorMismatch otherwise.  Binding a ChainGeometry (or a bare particle
    count) raises ChainTooShort when the plan needs more particles.
    """
    norm = normalize_curve(curve)
    crossings = crossing_sequence(norm, pitch)
    if len(crossings) < 2:
        raise EmptyPlan(
            "curve crosses fewer than two lattice edges at this pitch"
        )

    elements: list[StripElement] = []
    dirs: list[FoldDirection] = []
    for i in range(len(crossings) - 1):
        c0, c1 = crossings[i], crossings[i + 1]
        tri = common_triangle(c0.edge, c1.edge)
        if tri is None:  # pragma: no cover - walk invariant
            raise AssertionError("consecutive crossings share no cell")
        chord = (c1.point[0] - c0.point[0], c1.point[1] - c0.point[1])
        dirs.append(fold_direction(c0.edge, c1.edge, chord))
        elements.append(StripElement(tri, c0.edge, c1.edge))

    strip = TriangleStrip(elements)
    derived = AnchorPose(elements[0].tri, elements[0].entry)
    if anchor is not None and anchor != "auto":
        if not isinstance(anchor, AnchorPose):
            raise ValueError("anchor must be an AnchorPose or 'auto'")
        if anchor != derived:
            raise AnchorMismatch(
                f"requested anchor {anchor} but the curve starts at {derived}"
            )

    if chain is not None:
        capacity = chain.n if isinstance(chain, ChainGeometry) else int(chain)
        if len(dirs) > capacity:
            raise ChainTooShort(
                f"plan needs {len(dirs)} particles, chain has {capacity}"
            )

    return PlanResult(plan=FoldPlan(tuple(dirs), derived), strip=strip)
