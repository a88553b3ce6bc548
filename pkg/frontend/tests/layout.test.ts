import { describe, expect, it } from "vitest";

import { nodeColor } from "../src/colors.js";
import { afterElectionTimeout, electionRoot, setup } from "./helpers.js";

function position(root: HTMLElement, name: string): { x: number; y: number } {
  const box = root.querySelector<HTMLElement>(`.node[data-node="${name}"]`)!;
  return { x: parseInt(box.style.left, 10), y: parseInt(box.style.top, 10) };
}

function drag(
  root: HTMLElement,
  name: string,
  dx: number,
  dy: number,
): void {
  const box = root.querySelector<HTMLElement>(`.node[data-node="${name}"]`)!;
  box.dispatchEvent(
    new MouseEvent("mousedown", { bubbles: true, clientX: 200, clientY: 200 }),
  );
  document.dispatchEvent(
    new MouseEvent("mousemove", {
      bubbles: true,
      clientX: 200 + dx,
      clientY: 200 + dy,
    }),
  );
  document.dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
}

describe("arena layout", () => {
  it("nodes start on a circle with distinct positions", () => {
    const { app, root } = setup();
    app.applyUpdate(electionRoot());
    const seen = new Set(
      ["S1", "S2", "S3", "S4"].map((n) => JSON.stringify(position(root, n))),
    );
    expect(seen.size).toBe(4);
  });

  it("dragging repositions a node and the position survives updates", () => {
    const { app, root } = setup();
    app.applyUpdate(electionRoot());
    const before = position(root, "S1");
    drag(root, "S1", 40, 25);
    const after = position(root, "S1");
    expect(after).toEqual({ x: before.x + 40, y: before.y + 25 });

    app.applyUpdate(afterElectionTimeout());
    expect(position(root, "S1")).toEqual(after);
  });

  it("a drag does not double as a state-panel click", () => {
    const { app, root } = setup();
    app.applyUpdate(electionRoot());
    drag(root, "S2", 30, 0);
    // the click that follows mouseup must not have toggled the panel
    root
      .querySelector<HTMLElement>('.node[data-node="S2"]')!
      .dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(root.querySelector('.node[data-node="S2"] .state')).toBeNull();
  });

  it("tiny presses still count as clicks", () => {
    const { app, root } = setup();
    app.applyUpdate(electionRoot());
    const title = root.querySelector<HTMLElement>('.node[data-node="S3"] .title')!;
    title.dispatchEvent(
      new MouseEvent("mousedown", { bubbles: true, clientX: 10, clientY: 10 }),
    );
    document.dispatchEvent(
      new MouseEvent("mousemove", { bubbles: true, clientX: 11, clientY: 10 }),
    );
    document.dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
    title.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(root.querySelector('.node[data-node="S3"] .state')).not.toBeNull();
  });
});

describe("sender colors", () => {
  it("are stable and well-formed", () => {
    expect(nodeColor("S1")).toBe(nodeColor("S1"));
    expect(nodeColor("S1")).toMatch(/^hsl\(/);
  });

  it("small clusters of names get distinct colors", () => {
    const names = ["S1", "S2", "S3", "S4", "S5", "client", "server"];
    expect(new Set(names.map(nodeColor)).size).toBe(names.length);
  });
});
