import { describe, expect, it } from "vitest";

import { circularLayout, Positions } from "../src/layout.js";
import {
  arcLabel,
  arcVisuals,
  MAX_THICKNESS,
  MIN_THICKNESS,
  thicknessForFlow,
} from "../src/render.js";
import type { Snapshot } from "../src/types.js";

function snapshotWith(flow: number[][]): Snapshot {
  let max = -Infinity;
  let arc = { tail: 0, head: 0, value: 0 };
  flow.forEach((row, i) =>
    row.forEach((v, j) => {
      if (v > max) {
        max = v;
        arc = { tail: i, head: j, value: v };
      }
    }),
  );
  return {
    stage: 0,
    flow,
    maxFlowArc: arc,
    premagicResidual: 0,
    entropy: { perNode: flow.map(() => 0), networkEntropy: 0 },
    cloudNode: null,
    referenceArc: null,
    referenceFlow: null,
  };
}

describe("thicknessForFlow", () => {
  it("is linear in the flow value", () => {
    expect(thicknessForFlow(6, 12)).toBeCloseTo(6);
    expect(thicknessForFlow(12, 12)).toBe(MAX_THICKNESS);
  });

  it("clamps to the 1..12 pixel band", () => {
    expect(thicknessForFlow(0.001, 100)).toBe(MIN_THICKNESS);
    expect(thicknessForFlow(500, 12)).toBe(MAX_THICKNESS);
    expect(thicknessForFlow(0, 0)).toBe(MIN_THICKNESS);
  });
});

describe("arcLabel", () => {
  it("is the verbatim string form of the served number", () => {
    expect(arcLabel(3.5)).toBe("3.5");
    expect(arcLabel(1)).toBe("1");
    expect(arcLabel(0.666666666667)).toBe("0.666666666667");
  });
});

describe("arcVisuals", () => {
  it("labels every positive arc and highlights the max-flow arc", () => {
    const snapshot = snapshotWith([
      [0, 2, 0],
      [0, 0, 1],
      [6, 0, 0],
    ]);
    const visuals = arcVisuals({ snapshot, positions: null as never, labels: [], lastEdit: null });
    expect(visuals).toHaveLength(3);
    const byArc = new Map(visuals.map((v) => [`${v.tail}-${v.head}`, v]));
    expect(byArc.get("2-0")!.highlight).toBe("max");
    expect(byArc.get("2-0")!.label).toBe("6");
    expect(byArc.get("1-2")!.thickness).toBe(MAX_THICKNESS / 6);
  });

  it("marks the last edit when it is not the max arc", () => {
    const snapshot = snapshotWith([
      [0, 2],
      [1, 0],
    ]);
    const visuals = arcVisuals({
      snapshot,
      positions: null as never,
      labels: [],
      lastEdit: { tail: 1, head: 0 },
    });
    const edited = visuals.find((v) => v.tail === 1 && v.head === 0)!;
    expect(edited.highlight).toBe("edit");
  });
});

describe("layout", () => {
  it("spreads nodes on a circle inside the canvas", () => {
    const points = circularLayout(6, 720, 540);
    expect(points).toHaveLength(6);
    for (const p of points) {
      expect(p.x).toBeGreaterThan(0);
      expect(p.x).toBeLessThan(720);
      expect(p.y).toBeGreaterThan(0);
      expect(p.y).toBeLessThan(540);
    }
  });

  it("supports dragging and hit-testing", () => {
    const positions = new Positions(3, 720, 540);
    positions.moveTo(0, 100, 100);
    expect(positions.hit(104, 103)).toBe(0);
    expect(positions.hit(300, 300, 10)).toBeNull();
  });

  it("grows for a cloud node without moving existing ones", () => {
    const positions = new Positions(3, 720, 540);
    const before = positions.get(1);
    positions.ensure(4, 720, 540);
    expect(positions.count).toBe(4);
    expect(positions.get(1)).toEqual(before);
  });
});
