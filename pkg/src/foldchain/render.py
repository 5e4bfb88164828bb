"""SVG rendering of triangle strips and their target curves.

Coordinates are emitted with a fixed number of decimals so identical
inputs always produce identical bytes, making golden-file comparisons
meaningful.  The drawing flips the y axis (SVG grows downward) and adds a
one-pitch margin around the content.
"""

from __future__ import annotations

from typing import Optional

from .geometry import Curve, FoldDirection, TriangleStrip, triangle_vertices

PRECISION = 3

UP_FILL = "#cfe3f7"
DOWN_FILL = "#f7dfc9"
EDGE_STROKE = "#444444"
CURVE_STROKE = "#b02020"
LABEL_FILL = "#222222"


def _fmt(v: float) -> str:
    s = f"{v:.{PRECISION}f}"
    if s.startswith("-") and float(s) == 0:  # avoid "-0.000"
        s = s[1:]
    return s


def render_svg(
    strip: TriangleStrip,
    directions,
    pitch_mm: float,
    curve: Optional[Curve] = None,
) -> str:
    """One polygon per strip triangle, direction labels, curve overlay."""
    tris = [triangle_vertices(el.tri, pitch_mm) for el in strip.elements]
    xs = [x for tri in tris for x, _ in tri]
    ys = [y for tri in tris for _, y in tri]
    if curve is not None:
        xs += [x for x, _ in curve.points]
        ys += [y for _, y in curve.points]
    margin = pitch_mm
    min_x, max_x = min(xs) - margin, max(xs) + margin
    min_y, max_y = min(ys) - margin, max(ys) + margin
    width = max_x - min_x
    height = max_y - min_y

    def to_svg(p: tuple[float, float]) -> tuple[float, float]:
        return (p[0] - min_x, max_y - p[1])

    def points_attr(points) -> str:
        return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(to_svg, points))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
        f'width="{_fmt(width)}" height="{_fmt(height)}">',
    ]
    for el in strip.elements:
        fill = UP_FILL if el.tri.up else DOWN_FILL
        lines.append(
            f'  <polygon points="{points_attr(triangle_vertices(el.tri, pitch_mm))}" '
            f'fill="{fill}" stroke="{EDGE_STROKE}" stroke-width="{_fmt(pitch_mm * 0.02)}"/>'
        )
    label_size = pitch_mm * 0.3
    for el, direction in zip(strip.elements, directions):
        verts = triangle_vertices(el.tri, pitch_mm)
        cx = sum(x for x, _ in verts) / 3
        cy = sum(y for _, y in verts) / 3
        sx, sy = to_svg((cx, cy))
        text = "L" if direction is FoldDirection.LEFT else "R"
        lines.append(
            f'  <text x="{_fmt(sx)}" y="{_fmt(sy)}" font-size="{_fmt(label_size)}" '
            f'font-family="sans-serif" fill="{LABEL_FILL}" '
            f'text-anchor="middle" dominant-baseline="middle">{text}</text>'
        )
    if curve is not None:
        lines.append(
            f'  <polyline points="{points_attr(curve.points)}" fill="none" '
            f'stroke="{CURVE_STROKE}" stroke-width="{_fmt(pitch_mm * 0.04)}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
