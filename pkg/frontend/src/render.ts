/** Canvas rendering of the network and its flows. Labels show snapshot values
 * verbatim (String of the parsed JSON number); the only client-side mapping is
 * visual: line thickness linear in flow, clamped to [1px, 12px]. */

import type { Positions } from "./layout.js";
import type { Snapshot } from "./types.js";

export const MIN_THICKNESS = 1;
export const MAX_THICKNESS = 12;

export interface CanvasModel {
  snapshot: Snapshot;
  positions: Positions;
  labels: string[];
  lastEdit: { tail: number; head: number } | null;
}

export function thicknessForFlow(value: number, maxValue: number): number {
  if (!(maxValue > 0) || !(value > 0)) return MIN_THICKNESS;
  const scaled = (value / maxValue) * MAX_THICKNESS;
  return Math.min(MAX_THICKNESS, Math.max(MIN_THICKNESS, scaled));
}

/** Verbatim display form of a served number; never reformatted or recomputed. */
export function arcLabel(value: number): string {
  return String(value);
}

export function isMaxFlowArc(snapshot: Snapshot, tail: number, head: number): boolean {
  return snapshot.maxFlowArc.tail === tail && snapshot.maxFlowArc.head === head;
}

export interface ArcVisual {
  tail: number;
  head: number;
  value: number;
  label: string;
  thickness: number;
  highlight: "max" | "edit" | null;
}

/** Flatten the snapshot into per-arc draw instructions. */
export function arcVisuals(model: CanvasModel): ArcVisual[] {
  const { snapshot, lastEdit } = model;
  const out: ArcVisual[] = [];
  const max = snapshot.maxFlowArc.value;
  snapshot.flow.forEach((row, tail) => {
    row.forEach((value, head) => {
      if (value <= 0) return;
      let highlight: ArcVisual["highlight"] = null;
      if (isMaxFlowArc(snapshot, tail, head)) highlight = "max";
      else if (lastEdit && lastEdit.tail === tail && lastEdit.head === head) highlight = "edit";
      out.push({
        tail,
        head,
        value,
        label: arcLabel(value),
        thickness: thicknessForFlow(value, max),
        highlight,
      });
    });
  });
  return out;
}

const NODE_RADIUS = 16;

export function drawNetwork(ctx: CanvasRenderingContext2D, model: CanvasModel): void {
  const { positions, labels } = model;
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.font = "12px sans-serif";

  for (const arc of arcVisuals(model)) {
    const a = positions.get(arc.tail);
    const b = positions.get(arc.head);
    const angle = Math.atan2(b.y - a.y, b.x - a.x);
    const sx = a.x + NODE_RADIUS * Math.cos(angle);
    const sy = a.y + NODE_RADIUS * Math.sin(angle);
    const ex = b.x - NODE_RADIUS * Math.cos(angle);
    const ey = b.y - NODE_RADIUS * Math.sin(angle);
    // offset parallel arcs of opposite direction
    const off = 5;
    const ox = off * Math.sin(angle);
    const oy = -off * Math.cos(angle);

    ctx.strokeStyle = arc.highlight === "max" ? "#d62728" : arc.highlight === "edit" ? "#2ca02c" : "#4a5568";
    ctx.lineWidth = arc.thickness;
    ctx.beginPath();
    ctx.moveTo(sx + ox, sy + oy);
    ctx.lineTo(ex + ox, ey + oy);
    ctx.stroke();

    // arrow head
    ctx.beginPath();
    ctx.moveTo(ex + ox, ey + oy);
    ctx.lineTo(ex + ox - 10 * Math.cos(angle - 0.4), ey + oy - 10 * Math.sin(angle - 0.4));
    ctx.lineTo(ex + ox - 10 * Math.cos(angle + 0.4), ey + oy - 10 * Math.sin(angle + 0.4));
    ctx.closePath();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fill();

    const mx = (sx + ex) / 2 + 2.5 * ox;
    const my = (sy + ey) / 2 + 2.5 * oy;
    ctx.fillStyle = "#1a202c";
    ctx.fillText(arc.label, mx, my);
  }

  for (let i = 0; i < positions.count; i += 1) {
    const p = positions.get(i);
    ctx.beginPath();
    ctx.arc(p.x, p.y, NODE_RADIUS, 0, 2 * Math.PI);
    ctx.fillStyle = model.snapshot.cloudNode === i ? "#e2e8f0" : "#fff";
    ctx.fill();
    ctx.strokeStyle = "#2d3748";
    ctx.lineWidth = 1.5;
    ctx.stroke();
    ctx.fillStyle = "#1a202c";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(labels[i] ?? String(i + 1), p.x, p.y);
    ctx.textAlign = "start";
    ctx.textBaseline = "alphabetic";
  }
}
