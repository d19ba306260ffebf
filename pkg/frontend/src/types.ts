/** Wire types mirroring the what-if service's /api/v1 JSON payloads. */

export interface MaxFlowArc {
  tail: number;
  head: number;
  value: number;
}

export interface EntropyReport {
  perNode: number[];
  networkEntropy: number;
}

export interface Snapshot {
  stage: number;
  flow: number[][];
  maxFlowArc: MaxFlowArc;
  premagicResidual: number;
  entropy: EntropyReport;
  cloudNode: number | null;
  referenceArc: number[] | null;
  referenceFlow: number | null;
}

export interface SessionCreated {
  sessionId: string;
  snapshot: Snapshot;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail?: string | null;
}

export interface NetworkDocument {
  schemaVersion: number;
  nodes: { id: number; label?: string; x?: number; y?: number }[];
  arcs: { tail: number; head: number; capacity: number }[];
}

export interface EditRequest {
  op: "add" | "remove";
  tail: number;
  head: number;
  capacity: number;
}
