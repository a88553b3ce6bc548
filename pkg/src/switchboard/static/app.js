/** The whole UI: an arena of draggable nodes with inbox chips, a history
 * tree, and an inspector. Rendering is server-authoritative: every update
 * replaces the displayed snapshot wholesale, and nothing on screen moves
 * on its own — no clocks, no animation, state changes only when the user
 * delivers something.
 */
import { nodeColor } from "./colors.js";
import { Store } from "./store.js";
const ARENA_W = 860;
const ARENA_H = 560;
const NODE_W = 150;
const DRAG_THRESHOLD = 3; // px before a press counts as a drag, not a click
function pretty(value) {
    return JSON.stringify(value, null, 2) ?? "null";
}
export function createApp(root, send) {
    const store = new Store();
    const positions = new Map();
    const expanded = new Set();
    let selection = null;
    let justDragged = false;
    root.innerHTML = `
    <div class="banner" hidden>connection lost</div>
    <div class="toast" hidden></div>
    <div class="columns">
      <div class="arena" style="width:${ARENA_W}px;height:${ARENA_H}px"></div>
      <aside class="side">
        <h2>history</h2>
        <div class="history"></div>
        <h2>inspector</h2>
        <div class="inspector">nothing selected</div>
      </aside>
    </div>
    <div class="menu" hidden></div>`;
    const arena = root.querySelector(".arena");
    const historyPane = root.querySelector(".history");
    const inspector = root.querySelector(".inspector");
    const toast = root.querySelector(".toast");
    const banner = root.querySelector(".banner");
    const menu = root.querySelector(".menu");
    function showToast(text) {
        toast.textContent = text;
        toast.hidden = false;
    }
    function sendCommand(command) {
        if (store.pending)
            return;
        store.commandSent();
        renderAll(); // freeze the controls before the socket round trip
        send(JSON.stringify(command));
    }
    /** First-seen nodes go on a circle; after that the user owns the layout. */
    function ensurePositions(names) {
        const sorted = [...names].sort();
        const cx = ARENA_W / 2;
        const cy = ARENA_H / 2;
        const r = Math.min(ARENA_W, ARENA_H) / 2 - 80;
        sorted.forEach((name, i) => {
            if (!positions.has(name)) {
                const angle = (2 * Math.PI * i) / sorted.length - Math.PI / 2;
                positions.set(name, {
                    x: Math.round(cx + r * Math.cos(angle) - NODE_W / 2),
                    y: Math.round(cy + r * Math.sin(angle) - 30),
                });
            }
        });
    }
    function chipButton(owner, entry, kind) {
        const chip = document.createElement("button");
        chip.className = `chip ${kind}`;
        chip.dataset.id = String(entry.id);
        chip.dataset.owner = owner;
        chip.textContent = entry.type;
        const sender = kind === "message" ? entry.from : owner;
        chip.style.background = nodeColor(sender);
        chip.title =
            kind === "message"
                ? `${entry.type} from ${entry.from} — click to deliver`
                : `${entry.type} timeout — click to fire`;
        chip.disabled = store.pending;
        return chip;
    }
    function renderArena() {
        arena.textContent = "";
        if (!store.snapshot)
            return;
        for (const name of Object.keys(store.snapshot.states).sort()) {
            const pos = positions.get(name);
            const box = document.createElement("div");
            box.className = "node";
            box.dataset.node = name;
            box.style.left = `${pos.x}px`;
            box.style.top = `${pos.y}px`;
            const title = document.createElement("div");
            title.className = "title";
            const swatch = document.createElement("span");
            swatch.className = "swatch";
            swatch.style.background = nodeColor(name);
            title.append(swatch, name);
            box.append(title);
            if (expanded.has(name)) {
                const state = document.createElement("pre");
                state.className = "state";
                state.textContent = pretty(store.snapshot.states[name]);
                box.append(state);
            }
            const tray = document.createElement("div");
            tray.className = "inbox";
            const inbox = store.snapshot.inboxes[name];
            for (const m of inbox.messages)
                tray.append(chipButton(name, m, "message"));
            for (const t of inbox.timeouts)
                tray.append(chipButton(name, t, "timeout"));
            box.append(tray);
            arena.append(box);
        }
    }
    function renderHistory() {
        historyPane.textContent = "";
        const build = (id) => {
            const node = store.history.get(id);
            const li = document.createElement("li");
            const button = document.createElement("button");
            button.className = "hist";
            button.dataset.id = String(id);
            button.textContent = node.label;
            if (id === store.cursor)
                button.classList.add("cursor");
            button.disabled = store.pending;
            li.append(button);
            const kids = store.children(id);
            if (kids.length > 0) {
                const ul = document.createElement("ul");
                for (const kid of kids)
                    ul.append(build(kid));
                li.append(ul);
            }
            return li;
        };
        const top = document.createElement("ul");
        for (const id of store.roots())
            top.append(build(id));
        historyPane.append(top);
    }
    function renderInspector() {
        if (!selection || !store.snapshot) {
            inspector.textContent = "nothing selected";
            return;
        }
        let heading;
        let body;
        if (selection.kind === "node") {
            heading = `state of ${selection.name}`;
            body = store.snapshot.states[selection.name] ?? null;
        }
        else if (selection.kind === "message") {
            const m = selection.entry;
            heading = `${m.type} from ${m.from} to ${selection.owner} (id ${m.id})`;
            body = m.body;
        }
        else {
            const t = selection.entry;
            heading = `${t.type} timeout at ${selection.owner} (id ${t.id})`;
            body = t.body;
        }
        inspector.textContent = "";
        const h = document.createElement("div");
        h.className = "inspect-title";
        h.textContent = heading;
        const pre = document.createElement("pre");
        pre.textContent = pretty(body);
        inspector.append(h, pre);
    }
    function renderAll() {
        renderArena();
        renderHistory();
        renderInspector();
        if (store.lastError)
            showToast(store.lastError);
    }
    function closeMenu() {
        menu.hidden = true;
        menu.textContent = "";
    }
    function openMenu(x, y, items) {
        menu.textContent = "";
        for (const [label, action] of items) {
            const button = document.createElement("button");
            button.textContent = label;
            button.addEventListener("click", () => {
                closeMenu();
                action();
            });
            menu.append(button);
        }
        menu.style.left = `${x}px`;
        menu.style.top = `${y}px`;
        menu.hidden = false;
    }
    function findChip(id) {
        if (!store.snapshot)
            return null;
        for (const [owner, inbox] of Object.entries(store.snapshot.inboxes)) {
            const m = inbox.messages.find((e) => e.id === id);
            if (m)
                return { kind: "message", owner, entry: m };
            const t = inbox.timeouts.find((e) => e.id === id);
            if (t)
                return { kind: "timeout", owner, entry: t };
        }
        return null;
    }
    arena.addEventListener("click", (e) => {
        if (justDragged) {
            justDragged = false;
            return;
        }
        const target = e.target;
        const chip = target.closest("button.chip");
        if (chip) {
            if (store.pending)
                return;
            const id = Number(chip.dataset.id);
            const kind = store.chipKind(id);
            if (kind === null) {
                showToast("that item is no longer in the inbox");
                return;
            }
            sendCommand(kind === "message"
                ? { cmd: "deliverMessage", id }
                : { cmd: "deliverTimeout", id });
            return;
        }
        const title = target.closest(".title");
        if (title) {
            const name = title.closest(".node").dataset.node;
            if (expanded.has(name))
                expanded.delete(name);
            else
                expanded.add(name);
            selection = { kind: "node", name };
            renderAll();
        }
    });
    arena.addEventListener("contextmenu", (e) => {
        const chip = e.target.closest("button.chip");
        if (!chip)
            return;
        e.preventDefault();
        const id = Number(chip.dataset.id);
        const found = findChip(id);
        if (!found) {
            showToast("that item is no longer in the inbox");
            return;
        }
        const items = [
            [
                "inspect",
                () => {
                    selection = found;
                    renderInspector();
                },
            ],
        ];
        if (found.kind === "message") {
            items.push(["drop", () => sendCommand({ cmd: "dropMessage", id })]);
            items.push([
                "duplicate",
                () => sendCommand({ cmd: "duplicateMessage", id }),
            ]);
        }
        openMenu(e.clientX, e.clientY, items);
    });
    historyPane.addEventListener("click", (e) => {
        const button = e.target.closest("button.hist");
        if (!button || store.pending)
            return;
        const id = Number(button.dataset.id);
        if (id === store.cursor)
            return; // already there, nothing to ask for
        sendCommand({ cmd: "resetTo", historyNodeId: id });
    });
    toast.addEventListener("click", () => {
        toast.hidden = true;
    });
    document.addEventListener("click", (e) => {
        if (!menu.hidden && !menu.contains(e.target))
            closeMenu();
    });
    // drag to reposition: a small movement threshold separates dragging a
    // node from clicking its title to expand the state panel
    let drag = null;
    arena.addEventListener("mousedown", (e) => {
        const target = e.target;
        if (target.closest("button.chip"))
            return;
        const box = target.closest(".node");
        if (!box)
            return;
        const name = box.dataset.node;
        drag = {
            name,
            box,
            fromX: e.clientX,
            fromY: e.clientY,
            origin: { ...positions.get(name) },
            moved: false,
        };
    });
    document.addEventListener("mousemove", (e) => {
        if (!drag)
            return;
        const dx = e.clientX - drag.fromX;
        const dy = e.clientY - drag.fromY;
        if (!drag.moved && Math.abs(dx) + Math.abs(dy) < DRAG_THRESHOLD)
            return;
        drag.moved = true;
        const next = { x: drag.origin.x + dx, y: drag.origin.y + dy };
        positions.set(drag.name, next);
        drag.box.style.left = `${next.x}px`;
        drag.box.style.top = `${next.y}px`;
    });
    document.addEventListener("mouseup", () => {
        if (drag?.moved)
            justDragged = true;
        drag = null;
    });
    return {
        store,
        applyUpdate(update) {
            store.apply(update);
            if (!update.error)
                toast.hidden = true;
            ensurePositions(Object.keys(update.snapshot.states));
            renderAll();
        },
        connectionLost() {
            banner.hidden = false;
            store.pending = true; // nothing can be sent any more
            renderAll();
        },
    };
}
