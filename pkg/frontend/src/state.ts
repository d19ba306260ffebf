/** Editor session state: snapshot history, the click-driven edit loop, and the
 * undo timeline. The UI renders only after the server answers (no optimistic
 * updates); a rejected edit surfaces a toast and leaves everything unchanged.
 * This module performs no flow arithmetic - snapshots are stored verbatim. */

import { ApiClient, ApiError } from "./api.js";
import type { NetworkDocument, Snapshot } from "./types.js";

export interface Toast {
  code: string;
  message: string;
}

export type Listener = () => void;

export class EditorState {
  sessionId: string | null = null;
  /** One snapshot per stage; index equals stage number. */
  history: Snapshot[] = [];
  lastEdit: { tail: number; head: number } | null = null;
  toast: Toast | null = null;
  busy = false;

  private queue: Promise<void> = Promise.resolve();
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  get current(): Snapshot | null {
    return this.history.length ? this.history[this.history.length - 1]! : null;
  }

  /** Serialize edits: at most one in-flight request, later clicks queue up. */
  private enqueue(task: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(async () => {
      this.busy = true;
      this.notify();
      try {
        await task();
      } finally {
        this.busy = false;
        this.notify();
      }
    });
    return this.queue;
  }

  async createSession(network: NetworkDocument, referenceArc?: [number, number]): Promise<void> {
    await this.enqueue(async () => {
      const created = await this.api.createSession(network, referenceArc);
      this.sessionId = created.sessionId;
      this.history = [created.snapshot];
      this.lastEdit = null;
      this.toast = null;
    });
  }

  async addArc(tail: number, head: number): Promise<void> {
    await this.edit("add", tail, head);
  }

  async removeArc(tail: number, head: number): Promise<void> {
    await this.edit("remove", tail, head);
  }

  private async edit(op: "add" | "remove", tail: number, head: number): Promise<void> {
    await this.enqueue(async () => {
      if (!this.sessionId) return;
      try {
        // New arcs always get capacity 1; the editor offers no weight input.
        const snapshot = await this.api.applyEdit(this.sessionId, { op, tail, head, capacity: 1 });
        this.history.push(snapshot);
        this.lastEdit = { tail, head };
        this.toast = null;
      } catch (error) {
        if (error instanceof ApiError) {
          this.toast = { code: error.code, message: error.message };
        } else {
          throw error;
        }
      }
    });
  }

  /** Timeline click: undo until the history is `stage + 1` snapshots long. */
  async undoToStage(stage: number): Promise<void> {
    await this.enqueue(async () => {
      if (!this.sessionId) return;
      while (this.history.length - 1 > stage) {
        const snapshot = await this.api.undo(this.sessionId);
        this.history.pop();
        const expected = this.history[this.history.length - 1];
        // The server returns the previous stage's snapshot; keep its copy.
        if (expected && snapshot.stage === expected.stage) {
          this.history[this.history.length - 1] = snapshot;
        }
      }
      this.lastEdit = null;
      this.toast = null;
    });
  }

  dismissToast(): void {
    this.toast = null;
    this.notify();
  }
}

/** Circular 1..n network document, the default canvas content. */
export function cycleDocument(n: number): NetworkDocument {
  return {
    schemaVersion: 1,
    nodes: Array.from({ length: n }, (_, i) => ({ id: i, label: String(i + 1) })),
    arcs: Array.from({ length: n }, (_, i) => ({ tail: i, head: (i + 1) % n, capacity: 1 })),
  };
}
