/** Scripted-backend plumbing: build updates by hand, capture commands. */

import { createApp, type App } from "../src/app.js";
import type {
  Command,
  HistoryNode,
  InboxView,
  Update,
  Value,
} from "../src/protocol.js";

export interface Harness {
  app: App;
  root: HTMLElement;
  sent: Command[];
}

export function setup(): Harness {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  const sent: Command[] = [];
  const app = createApp(root, (text) => sent.push(JSON.parse(text)));
  return { app, root, sent };
}

export function emptyInbox(): InboxView {
  return { messages: [], timeouts: [] };
}

export function historyNode(
  id: number,
  parent: number | null,
  label: string,
): HistoryNode {
  return { id, parent, label, event: null };
}

/** A fresh 4-node election: every node holds one E timeout (ids 1..4). */
export function electionRoot(): Update {
  const states: Record<string, Value> = {};
  const inboxes: Record<string, InboxView> = {};
  ["S1", "S2", "S3", "S4"].forEach((name, i) => {
    states[name] = { term: 0, votedFor: null };
    inboxes[name] = {
      messages: [],
      timeouts: [{ id: i + 1, type: "E", body: {} }],
    };
  });
  return {
    snapshot: { states, inboxes },
    historyDelta: [historyNode(0, null, "start")],
    cursor: 0,
  };
}

/** After S1's E fired: RV messages from S1 sit in S2..S4 (ids 5..7). */
export function afterElectionTimeout(): Update {
  const base = electionRoot();
  base.snapshot.states["S1"] = { term: 1, votedFor: "S1" };
  base.snapshot.inboxes["S1"] = emptyInbox();
  ["S2", "S3", "S4"].forEach((name, i) => {
    base.snapshot.inboxes[name].messages = [
      { id: 5 + i, from: "S1", type: "RV", body: { term: 1 } },
    ];
  });
  return {
    snapshot: base.snapshot,
    historyDelta: [historyNode(1, 0, "deliver E @S1")],
    cursor: 1,
  };
}

export function chip(root: HTMLElement, id: number): HTMLButtonElement {
  const found = root.querySelector<HTMLButtonElement>(
    `button.chip[data-id="${id}"]`,
  );
  if (!found) throw new Error(`no chip with id ${id} rendered`);
  return found;
}

export function histButton(root: HTMLElement, id: number): HTMLButtonElement {
  const found = root.querySelector<HTMLButtonElement>(
    `button.hist[data-id="${id}"]`,
  );
  if (!found) throw new Error(`no history button with id ${id} rendered`);
  return found;
}

export function click(el: Element): void {
  el.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function rightClick(el: Element, x = 50, y = 50): void {
  el.dispatchEvent(
    new MouseEvent("contextmenu", { bubbles: true, clientX: x, clientY: y }),
  );
}

/** The chips rendered for one node, as (id, label) pairs in DOM order. */
export function renderedChips(
  root: HTMLElement,
  node: string,
): { id: number; label: string }[] {
  const boxes = root.querySelectorAll<HTMLElement>(
    `.node[data-node="${node}"] button.chip`,
  );
  return [...boxes].map((b) => ({
    id: Number(b.dataset.id),
    label: b.textContent ?? "",
  }));
}
