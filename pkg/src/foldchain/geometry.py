"""Triangular-lattice primitives and chain forward kinematics.

Coordinate conventions
----------------------

A triangle cell is addressed as ``TriCoord(q, r, up)``.  Row ``r`` occupies
the horizontal band ``y in [r*H, (r+1)*H]`` with ``H = sqrt(3)/2 * pitch``.
Lattice vertices are keyed by integer pairs ``(k, j)`` placed at

    x = (k + j/2) * pitch,    y = j * H.

With that mapping the two cells at the origin come out as

    TriCoord(0, 0, up=True)  -> (0, 0), (1, 0), (0.5, sqrt(3)/2)
    TriCoord(0, 0, up=False) -> (1, 0), (0.5, sqrt(3)/2), (1.5, sqrt(3)/2)

i.e. the apex-down cell sits immediately to the right of the apex-up cell
and shares its right edge.  Vertex keys of a cell:

    up(q, r)   -> (q, r), (q+1, r), (q, r+1)
    down(q, r) -> (q+1, r), (q, r+1), (q+1, r+1)

All edge identities are exact integer pairs, so adjacency never depends on
floating point.  Plane coordinates appear only at the boundary (vertex
positions, midpoints, point location) and scale linearly with ``pitch``.

Points that land exactly on an edge or vertex are resolved by nudging the
query point by ``TIE_EPS * pitch`` toward +x and, if still degenerate,
toward +y.  The planner uses the same epsilon for its right-of-travel
offset, so both modules agree on which cell owns a boundary point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence

from .errors import EmptyStrip, OutOfWorkArea, SelfIntersection

SQRT3 = math.sqrt(3.0)
ROW_HEIGHT = SQRT3 / 2.0  # band height in pitch units

# Tie-break offset in pitch units.  Large against double rounding noise
# (~1e-16 at desk scale), small against any feature a curve can encode.
TIE_EPS = 1e-9

Point = tuple[float, float]
VertexKey = tuple[int, int]


class FoldDirection(Enum):
    """Which flexible edge of a particle folds."""

    LEFT = "L"
    RIGHT = "R"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


def vertex_xy(v: VertexKey, pitch: float = 1.0) -> Point:
    """Plane position of a lattice vertex key."""
    k, j = v
    return ((k + 0.5 * j) * pitch, j * ROW_HEIGHT * pitch)


@dataclass(frozen=True, order=True)
class TriCoord:
    """Address of one triangle cell; ``up`` is the apex-up flag."""

    q: int
    r: int
    up: bool

    def vertex_keys(self) -> tuple[VertexKey, VertexKey, VertexKey]:
        q, r = self.q, self.r
        if self.up:
            return ((q, r), (q + 1, r), (q, r + 1))
        return ((q + 1, r), (q, r + 1), (q + 1, r + 1))

    def edges(self) -> tuple["LatticeEdge", "LatticeEdge", "LatticeEdge"]:
        a, b, c = self.vertex_keys()
        return (LatticeEdge(a, b), LatticeEdge(a, c), LatticeEdge(b, c))


def triangle_vertices(c: TriCoord, pitch: float) -> tuple[Point, Point, Point]:
    """Corner positions of a cell, in plane units, pitch-linear."""
    if pitch <= 0:
        raise ValueError("pitch must be positive")
    a, b, d = c.vertex_keys()
    return (vertex_xy(a, pitch), vertex_xy(b, pitch), vertex_xy(d, pitch))


def neighbors(c: TriCoord) -> tuple[TriCoord, TriCoord, TriCoord]:
    """The three edge-adjacent cells, all of opposite orientation."""
    q, r = c.q, c.r
    if c.up:
        return (
            TriCoord(q - 1, r, False),  # across the left edge
            TriCoord(q, r, False),      # across the right edge
            TriCoord(q, r - 1, False),  # across the bottom edge
        )
    return (
        TriCoord(q, r, True),       # across the left edge
        TriCoord(q + 1, r, True),   # across the right edge
        TriCoord(q, r + 1, True),   # across the top edge
    )


@dataclass(frozen=True)
class LatticeEdge:
    """Unit edge between two adjacent cells, keyed by its endpoint vertices.

    Endpoints are stored in canonical (sorted) order so equal edges compare
    and hash equal regardless of construction order.
    """

    a: VertexKey
    b: VertexKey

    def __post_init__(self) -> None:
        a, b = self.a, self.b
        if b < a:
            a, b = b, a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
        delta = (b[0] - a[0], b[1] - a[1])
        if delta not in ((1, 0), (0, 1), (1, -1)):
            raise ValueError(f"not a unit lattice edge: {a}..{b}")

    def endpoints(self, pitch: float = 1.0) -> tuple[Point, Point]:
        return (vertex_xy(self.a, pitch), vertex_xy(self.b, pitch))

    def midpoint(self, pitch: float = 1.0) -> Point:
        (x0, y0), (x1, y1) = self.endpoints(pitch)
        return ((x0 + x1) / 2.0, (y0 + y1) / 2.0)

    def triangles(self) -> tuple[TriCoord, TriCoord]:
        """The unordered pair of cells sharing this edge."""
        (k, j) = self.a
        delta = (self.b[0] - k, self.b[1] - j)
        if delta == (1, 0):      # horizontal
            return (TriCoord(k, j, True), TriCoord(k, j - 1, False))
        if delta == (0, 1):      # leaning +60 degrees
            return (TriCoord(k, j, True), TriCoord(k - 1, j, False))
        # delta == (1, -1): leaning +120 degrees; a is the upper endpoint
        return (TriCoord(k, j - 1, True), TriCoord(k, j - 1, False))

    def other_triangle(self, tri: TriCoord) -> TriCoord:
        t0, t1 = self.triangles()
        if tri == t0:
            return t1
        if tri == t1:
            return t0
        raise ValueError(f"{tri} does not border edge {self.a}..{self.b}")


def shared_edge(t0: TriCoord, t1: TriCoord) -> Optional[LatticeEdge]:
    """Common edge of two cells, or None when they are not adjacent."""
    common = set(t0.vertex_keys()) & set(t1.vertex_keys())
    if len(common) != 2:
        return None
    a, b = sorted(common)
    return LatticeEdge(a, b)


def common_triangle(e0: LatticeEdge, e1: LatticeEdge) -> Optional[TriCoord]:
    """The single cell bordered by both edges, or None.

    Two distinct lattice edges border at most one common cell; equal edges
    border two, which callers must rule out first.
    """
    both = set(e0.triangles()) & set(e1.triangles())
    if len(both) == 1:
        return both.pop()
    return None


def shared_corner(e0: LatticeEdge, e1: LatticeEdge) -> Optional[VertexKey]:
    common = {e0.a, e0.b} & {e1.a, e1.b}
    if len(common) == 1:
        return common.pop()
    return None


# --------------------------------------------------------------------------
# point location


def locate_point(p: Point, pitch: float) -> TriCoord:
    """Cell containing a plane point.

    Boundary points resolve by the shared tie-break convention: nudge the
    query by TIE_EPS*pitch toward +x, then toward +y if it still sits on a
    horizontal lattice line.
    """
    if pitch <= 0:
        raise ValueError("pitch must be positive")
    x = p[0] / pitch
    y = p[1] / pitch

    def coords(px: float, py: float) -> tuple[float, float, float]:
        fa = py / ROW_HEIGHT          # integer on horizontal lines
        fb = px - py / SQRT3          # integer on +60 degree lines
        fc = px + py / SQRT3          # integer on +120 degree lines
        return fa, fb, fc

    def degenerate(vals: tuple[float, float, float]) -> bool:
        return any(abs(v - round(v)) < TIE_EPS for v in vals)

    fa, fb, fc = coords(x, y)
    if degenerate((fa, fb, fc)):
        x += TIE_EPS
        fa, fb, fc = coords(x, y)
        if abs(fa - round(fa)) < TIE_EPS:
            y += TIE_EPS
            fa, fb, fc = coords(x, y)

    # fb equals q on the left edge line of column q, fc equals q+j there;
    # inside the up cell fb+fa's fractions stay below 1 so fc floors to q+j.
    j = math.floor(fa)
    q = math.floor(fb)
    up = math.floor(fc) == q + j
    return TriCoord(q, j, up)


# --------------------------------------------------------------------------
# curves


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    """Collinear point p lies within the closed box of segment ab."""
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_touch(p0: Point, p1: Point, q0: Point, q1: Point) -> bool:
    """True when closed segments p0p1 and q0q1 intersect or touch."""
    d1 = _orient(q0, q1, p0)
    d2 = _orient(q0, q1, p1)
    d3 = _orient(p0, p1, q0)
    d4 = _orient(p0, p1, q1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(q0, q1, p0):
        return True
    if d2 == 0 and _on_segment(q0, q1, p1):
        return True
    if d3 == 0 and _on_segment(p0, p1, q0):
        return True
    if d4 == 0 and _on_segment(p0, p1, q1):
        return True
    return False


@dataclass(frozen=True)
class Curve:
    """Open planar polyline in plane units (same length unit as pitch).

    At least two points, consecutive points distinct, no self-intersection.
    Violations raise ValueError / SelfIntersection at construction.
    """

    points: tuple[Point, ...]

    def __init__(self, points: Sequence[Sequence[float]]):
        pts = tuple((float(p[0]), float(p[1])) for p in points)
        if len(pts) < 2:
            raise ValueError("a curve needs at least two points")
        for i in range(len(pts) - 1):
            if pts[i] == pts[i + 1]:
                raise ValueError(f"consecutive duplicate point at index {i}")
        object.__setattr__(self, "points", pts)
        self._check_simple()

    def _check_simple(self) -> None:
        pts = self.points
        n = len(pts) - 1  # segment count
        for i in range(n):
            for k in range(i + 1, n):
                if k == i + 1:
                    # adjacent segments share one endpoint; only a fold-back
                    # overlap counts as self-contact
                    a, b, c = pts[i], pts[i + 1], pts[k + 1]
                    if _orient(a, b, c) == 0 and _on_segment(a, b, c) and c != b:
                        raise SelfIntersection(
                            f"segments {i} and {k} overlap collinearly"
                        )
                    continue
                if segments_touch(pts[i], pts[i + 1], pts[k], pts[k + 1]):
                    raise SelfIntersection(f"segments {i} and {k} intersect")

    def __len__(self) -> int:
        return len(self.points)

    def reversed(self) -> "Curve":
        return Curve(tuple(reversed(self.points)))

    def arc_length(self) -> float:
        return sum(
            math.dist(self.points[i], self.points[i + 1])
            for i in range(len(self.points) - 1)
        )


# --------------------------------------------------------------------------
# strips


@dataclass(frozen=True)
class StripElement:
    """One chain particle: its cell, entry edge and (optional) exit edge."""

    tri: TriCoord
    entry: LatticeEdge
    exit: Optional[LatticeEdge]


@dataclass(frozen=True)
class TriangleStrip:
    """Edge-connected run of cells traversed by the chain.

    Invariants checked at construction: entry/exit edges border their cell,
    exit differs from entry, consecutive elements share the connecting edge
    (exit of one is entry of the next) and orientation flags alternate.
    """

    elements: tuple[StripElement, ...]

    def __init__(self, elements: Sequence[StripElement]):
        elems = tuple(elements)
        for i, el in enumerate(elems):
            cell_edges = set(el.tri.edges())
            if el.entry not in cell_edges:
                raise ValueError(f"element {i}: entry edge not on its cell")
            if el.exit is not None:
                if el.exit not in cell_edges:
                    raise ValueError(f"element {i}: exit edge not on its cell")
                if el.exit == el.entry:
                    raise ValueError(f"element {i}: exit equals entry")
            elif i != len(elems) - 1:
                raise ValueError(f"element {i}: only the last exit may be unset")
        for i in range(len(elems) - 1):
            cur, nxt = elems[i], elems[i + 1]
            if cur.exit != nxt.entry:
                raise ValueError(f"elements {i},{i + 1}: not edge-connected")
            if shared_edge(cur.tri, nxt.tri) != cur.exit:
                raise ValueError(f"elements {i},{i + 1}: wrong connecting edge")
            if cur.tri.up == nxt.tri.up:
                raise ValueError(f"elements {i},{i + 1}: orientation repeats")
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[StripElement]:
        return iter(self.elements)

    def midline(self, pitch: float = 1.0) -> list[Point]:
        """Entry-edge midpoints in order, plus the final exit midpoint."""
        pts = [el.entry.midpoint(pitch) for el in self.elements]
        last = self.elements[-1] if self.elements else None
        if last is not None and last.exit is not None:
            pts.append(last.exit.midpoint(pitch))
        return pts


@dataclass(frozen=True)
class AnchorPose:
    """Cell of the top particle plus the edge it is entered through."""

    tri: TriCoord
    entry: LatticeEdge

    def __post_init__(self) -> None:
        if self.entry not in self.tri.edges():
            raise ValueError("anchor entry edge does not border the anchor cell")

    @classmethod
    def canonical(cls) -> "AnchorPose":
        """Origin up-cell entered through its left edge."""
        return cls(TriCoord(0, 0, True), LatticeEdge((0, 0), (0, 1)))


@dataclass(frozen=True)
class ChainGeometry:
    """Physical chain description: lattice pitch in mm, particle count."""

    pitch_mm: float
    n: int

    def __post_init__(self) -> None:
        if self.pitch_mm <= 0:
            raise ValueError("pitch_mm must be positive")
        if self.n < 1:
            raise ValueError("a chain has at least one particle")


@dataclass(frozen=True)
class WorkArea:
    """Axis-aligned rectangle in pitch units that the strip must stay in."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError("degenerate work area")

    def contains_triangle(self, tri: TriCoord) -> bool:
        tol = TIE_EPS
        for x, y in triangle_vertices(tri, 1.0):
            if not (self.x_min - tol <= x <= self.x_max + tol):
                return False
            if not (self.y_min - tol <= y <= self.y_max + tol):
                return False
        return True


# --------------------------------------------------------------------------
# fold side geometry shared with the planner


def _cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def fold_side_of_exit(entry: LatticeEdge, exit: LatticeEdge) -> FoldDirection:
    """Side of the corner shared by entry and exit, seen walking entry->exit.

    The reference direction is the chord between the edge midpoints.  The
    sign is invariant for any walk that genuinely enters through ``entry``
    and leaves through ``exit``, so the planner's crossing chords and this
    midpoint chord always agree.
    """
    corner = shared_corner(entry, exit)
    if corner is None:
        raise ValueError("edges do not share a corner")
    m_in = entry.midpoint(1.0)
    m_out = exit.midpoint(1.0)
    cx, cy = vertex_xy(corner, 1.0)
    side = _cross(m_out[0] - m_in[0], m_out[1] - m_in[1], cx - m_in[0], cy - m_in[1])
    return FoldDirection.LEFT if side > 0 else FoldDirection.RIGHT


def exit_edge_for(tri: TriCoord, entry: LatticeEdge, direction: FoldDirection) -> LatticeEdge:
    """The exit edge of ``tri`` that realizes ``direction`` after ``entry``."""
    for cand in tri.edges():
        if cand == entry:
            continue
        if fold_side_of_exit(entry, cand) == direction:
            return cand
    raise AssertionError("one candidate edge must match each direction")


# --------------------------------------------------------------------------
# forward kinematics


def strip_from_plan(
    plan,
    anchor: Optional[AnchorPose] = None,
    work_area: Optional[WorkArea] = None,
) -> TriangleStrip:
    """Strip obtained by folding ``plan`` from ``anchor``.

    ``plan`` is a sequence of FoldDirection, or any object carrying
    ``directions`` and ``anchor`` attributes (a planner FoldPlan).  An
    explicit ``anchor`` argument overrides the plan's own.  An empty plan
    yields the anchor cell alone with its exit edge unset.
    """
    directions: Sequence[FoldDirection]
    if hasattr(plan, "directions"):
        directions = plan.directions
        if anchor is None:
            anchor = plan.anchor
    else:
        directions = tuple(plan)
    if anchor is None:
        raise ValueError("an anchor is required when the plan carries none")

    def check_area(tri: TriCoord) -> None:
        if work_area is not None and not work_area.contains_triangle(tri):
            raise OutOfWorkArea(f"cell {tri} leaves the work area")

    check_area(anchor.tri)
    if not directions:
        return TriangleStrip([StripElement(anchor.tri, anchor.entry, None)])

    elements: list[StripElement] = []
    tri = anchor.tri
    entry = anchor.entry
    for direction in directions:
        exit_edge = exit_edge_for(tri, entry, direction)
        elements.append(StripElement(tri, entry, exit_edge))
        tri = exit_edge.other_triangle(tri)
        check_area(tri)
        entry = exit_edge
    return TriangleStrip(elements)


# --------------------------------------------------------------------------
# approximation error


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return math.dist(p, a)
    t = ((px - ax) * dx + (py - ay) * dy) / denom
    t = max(0.0, min(1.0, t))
    return math.dist(p, (ax + t * dx, ay + t * dy))


def _point_polyline_distance(p: Point, line: Sequence[Point]) -> float:
    if len(line) == 1:
        return math.dist(p, line[0])
    return min(
        _point_segment_distance(p, line[i], line[i + 1])
        for i in range(len(line) - 1)
    )


def sample_curve(curve: Curve, step: float) -> list[Point]:
    """Points along the curve at fixed arc-length steps, endpoints included."""
    if step <= 0:
        raise ValueError("step must be positive")
    out: list[Point] = [curve.points[0]]
    carry = 0.0
    for i in range(len(curve.points) - 1):
        a = curve.points[i]
        b = curve.points[i + 1]
        seg = math.dist(a, b)
        s = step - carry
        while s < seg:
            t = s / seg
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
            s += step
        carry = (carry + seg) % step
    if out[-1] != curve.points[-1]:
        out.append(curve.points[-1])
    return out


@dataclass(frozen=True)
class ApproxError:
    """Mean and maximum distance from the curve to the strip midline."""

    mean: float
    max: float


def approximation_error(
    strip: TriangleStrip,
    curve: Curve,
    pitch: float = 1.0,
    step: Optional[float] = None,
) -> ApproxError:
    """Distance statistics between a curve and a strip's midline polyline.

    The curve is sampled densely (default step pitch/100) and each sample is
    measured against the midline.  Units follow the curve / pitch.
    """
    if len(strip) == 0:
        raise EmptyStrip("cannot measure an empty strip")
    if step is None:
        step = pitch / 100.0
    line = strip.midline(pitch)
    samples = sample_curve(curve, step)
    dists = [_point_polyline_distance(p, line) for p in samples]
    return ApproxError(mean=sum(dists) / len(dists), max=max(dists))
