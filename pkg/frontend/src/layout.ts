/** Node placement: circular auto-layout for documents without coordinates,
 * plus drag bookkeeping for manual adjustment. */

export interface Point {
  x: number;
  y: number;
}

export function circularLayout(
  count: number,
  width: number,
  height: number,
  margin = 60,
): Point[] {
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.max(40, Math.min(width, height) / 2 - margin);
  return Array.from({ length: count }, (_, i) => {
    const angle = (2 * Math.PI * i) / count - Math.PI / 2;
    return { x: cx + radius * Math.cos(angle), y: cy + radius * Math.sin(angle) };
  });
}

export class Positions {
  private points: Point[];

  constructor(count: number, width: number, height: number, fixed?: (Point | undefined)[]) {
    this.points = circularLayout(count, width, height);
    if (fixed) {
      fixed.forEach((p, i) => {
        if (p && i < this.points.length) this.points[i] = { ...p };
      });
    }
  }

  get(i: number): Point {
    const p = this.points[i];
    if (!p) throw new Error(`no position for node ${i}`);
    return p;
  }

  get count(): number {
    return this.points.length;
  }

  moveTo(i: number, x: number, y: number): void {
    this.points[i] = { x, y };
  }

  /** Nearest node within `radius` of a click, or null. */
  hit(x: number, y: number, radius = 18): number | null {
    let best: number | null = null;
    let bestDist = radius;
    this.points.forEach((p, i) => {
      const d = Math.hypot(p.x - x, p.y - y);
      if (d <= bestDist) {
        best = i;
        bestDist = d;
      }
    });
    return best;
  }

  /** Grow to `count` nodes (e.g. a cloud node appearing), keeping existing spots. */
  ensure(count: number, width: number, height: number): void {
    if (count <= this.points.length) return;
    const fresh = circularLayout(count, width, height);
    for (let i = this.points.length; i < count; i += 1) {
      this.points.push(fresh[i]!);
    }
  }
}
