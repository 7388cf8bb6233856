// Freehand polygon capture over a canvas plus the point-in-polygon test
// used to turn the closed shape into a point selection.

export interface Pt {
  x: number;
  y: number;
}

export function pointInPolygon(p: Pt, poly: Pt[]): boolean {
  // Ray casting; vertices in screen space, polygon implicitly closed.
  let inside = false;
  for (let i = 0, j = poly.length - 1; i < poly.length; j = i++) {
    const a = poly[i];
    const b = poly[j];
    const crosses =
      a.y > p.y !== b.y > p.y &&
      p.x < ((b.x - a.x) * (p.y - a.y)) / (b.y - a.y) + a.x;
    if (crosses) inside = !inside;
  }
  return inside;
}

export class Lasso {
  private pts: Pt[] = [];
  active = false;

  start(p: Pt): void {
    this.pts = [p];
    this.active = true;
  }

  extend(p: Pt): void {
    if (!this.active) return;
    const last = this.pts[this.pts.length - 1];
    // skip sub-pixel jitter so the polygon stays small
    if (Math.abs(p.x - last.x) + Math.abs(p.y - last.y) >= 1) this.pts.push(p);
  }

  finish(): Pt[] {
    this.active = false;
    const poly = this.pts;
    this.pts = [];
    return poly;
  }

  get polygon(): readonly Pt[] {
    return this.pts;
  }
}

export function pointsInside(
  poly: Pt[],
  xs: ArrayLike<number>,
  ys: ArrayLike<number>,
): number[] {
  if (poly.length < 3) return [];
  const ids: number[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (pointInPolygon({ x: xs[i], y: ys[i] }, poly)) ids.push(i);
  }
  return ids;
}
