/** Metrics panel view-model: every field is a served value passed through
 * String(), so what the panel shows is byte-equal to the snapshot JSON. */

import { arcLabel } from "./render.js";
import type { Snapshot } from "./types.js";

export interface EntropyBar {
  label: string;
  text: string;
  /** Bar width fraction in [0, 1]; presentation only. */
  fraction: number;
}

export interface PanelView {
  stage: string;
  maxFlowArc: string;
  maxFlowValue: string;
  premagicResidual: string;
  networkEntropy: string;
  entropyBars: EntropyBar[];
  referenceArc: string | null;
  referenceFlow: string | null;
  cloud: string | null;
}

function arcName(tail: number, head: number, labels: string[]): string {
  const t = labels[tail] ?? String(tail + 1);
  const h = labels[head] ?? String(head + 1);
  return `${t} → ${h}`;
}

export function panelView(snapshot: Snapshot, labels: string[]): PanelView {
  const peak = Math.max(...snapshot.entropy.perNode, 1e-12);
  return {
    stage: String(snapshot.stage),
    maxFlowArc: arcName(snapshot.maxFlowArc.tail, snapshot.maxFlowArc.head, labels),
    maxFlowValue: arcLabel(snapshot.maxFlowArc.value),
    premagicResidual: arcLabel(snapshot.premagicResidual),
    networkEntropy: arcLabel(snapshot.entropy.networkEntropy),
    entropyBars: snapshot.entropy.perNode.map((value, i) => ({
      label: labels[i] ?? String(i + 1),
      text: arcLabel(value),
      fraction: value > 0 ? value / peak : 0,
    })),
    referenceArc: snapshot.referenceArc
      ? arcName(snapshot.referenceArc[0]!, snapshot.referenceArc[1]!, labels)
      : null,
    referenceFlow: snapshot.referenceFlow === null ? null : arcLabel(snapshot.referenceFlow),
    cloud: snapshot.cloudNode === null ? null : labels[snapshot.cloudNode] ?? "cloud",
  };
}
