/** Client-side session state: the last snapshot, the accumulated history
 * tree, and the lockstep flag. Pure data, no DOM. */

import type { HistoryNode, Snapshot, Update } from "./protocol.js";

export class Store {
  snapshot: Snapshot | null = null;
  history = new Map<number, HistoryNode>();
  cursor = -1;
  /** True while a command is outstanding; all input is ignored until the
   * next update, which is what keeps the client in lockstep. Starts true
   * because nothing may be sent before the greeting update. */
  pending = true;
  lastError: string | null = null;

  apply(update: Update): void {
    // deltas are lossless: the server only ever appends history nodes
    for (const node of update.historyDelta) {
      this.history.set(node.id, node);
    }
    this.snapshot = update.snapshot;
    this.cursor = update.cursor;
    this.lastError = update.error ?? null;
    this.pending = false;
  }

  commandSent(): void {
    this.pending = true;
  }

  /** Children ids of a history node, in id order (ids grow with time). */
  children(id: number): number[] {
    const out: number[] = [];
    for (const node of this.history.values()) {
      if (node.parent === id) out.push(node.id);
    }
    return out.sort((a, b) => a - b);
  }

  roots(): number[] {
    const out: number[] = [];
    for (const node of this.history.values()) {
      if (node.parent === null) out.push(node.id);
    }
    return out.sort((a, b) => a - b);
  }

  /** Does this id name a message or timeout in the current snapshot? */
  chipKind(id: number): "message" | "timeout" | null {
    if (!this.snapshot) return null;
    for (const inbox of Object.values(this.snapshot.inboxes)) {
      if (inbox.messages.some((m) => m.id === id)) return "message";
      if (inbox.timeouts.some((t) => t.id === id)) return "timeout";
    }
    return null;
  }
}
