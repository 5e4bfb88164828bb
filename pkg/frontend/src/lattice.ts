// Canvas-side lattice geometry: the same (q, r, up) cell convention the
// service documents, used here only to place what a response already
// decided. Vertex key (k, j) sits at (k + j/2, j*sqrt(3)/2) in pitch units.

import type { Point, StripElement } from "./types.js";

export const ROW_HEIGHT = Math.sqrt(3) / 2;

export interface Viewport {
  /** pixels per lattice pitch */
  scale: number;
  /** pan, in pixels, applied after scaling */
  offsetX: number;
  offsetY: number;
  /** canvas height, for the y flip (lattice y grows up, canvas y down) */
  height: number;
}

export function vertexXy(k: number, j: number): Point {
  return [k + 0.5 * j, j * ROW_HEIGHT];
}

export function triangleVertices(cell: {
  q: number;
  r: number;
  up: boolean;
}): [Point, Point, Point] {
  const { q, r, up } = cell;
  return up
    ? [vertexXy(q, r), vertexXy(q + 1, r), vertexXy(q, r + 1)]
    : [vertexXy(q + 1, r), vertexXy(q, r + 1), vertexXy(q + 1, r + 1)];
}

export function stripPolygons(strip: StripElement[]): [Point, Point, Point][] {
  return strip.map(triangleVertices);
}

/** Pitch-unit world point to canvas pixels. */
export function toCanvas(p: Point, vp: Viewport): Point {
  return [p[0] * vp.scale + vp.offsetX, vp.height - (p[1] * vp.scale + vp.offsetY)];
}

/** Canvas pixels back to pitch units, for pointer handling. */
export function fromCanvas(p: Point, vp: Viewport): Point {
  return [(p[0] - vp.offsetX) / vp.scale, (vp.height - p[1] - vp.offsetY) / vp.scale];
}

export interface Bounds {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export function polygonsBounds(polys: [Point, Point, Point][]): Bounds | null {
  if (polys.length === 0) {
    return null;
  }
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const tri of polys) {
    for (const [x, y] of tri) {
      minX = Math.min(minX, x);
      minY = Math.min(minY, y);
      maxX = Math.max(maxX, x);
      maxY = Math.max(maxY, y);
    }
  }
  return { minX, minY, maxX, maxY };
}
