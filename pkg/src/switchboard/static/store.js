/** Client-side session state: the last snapshot, the accumulated history
 * tree, and the lockstep flag. Pure data, no DOM. */
export class Store {
    constructor() {
        this.snapshot = null;
        this.history = new Map();
        this.cursor = -1;
        /** True while a command is outstanding; all input is ignored until the
         * next update, which is what keeps the client in lockstep. Starts true
         * because nothing may be sent before the greeting update. */
        this.pending = true;
        this.lastError = null;
    }
    apply(update) {
        // deltas are lossless: the server only ever appends history nodes
        for (const node of update.historyDelta) {
            this.history.set(node.id, node);
        }
        this.snapshot = update.snapshot;
        this.cursor = update.cursor;
        this.lastError = update.error ?? null;
        this.pending = false;
    }
    commandSent() {
        this.pending = true;
    }
    /** Children ids of a history node, in id order (ids grow with time). */
    children(id) {
        const out = [];
        for (const node of this.history.values()) {
            if (node.parent === id)
                out.push(node.id);
        }
        return out.sort((a, b) => a - b);
    }
    roots() {
        const out = [];
        for (const node of this.history.values()) {
            if (node.parent === null)
                out.push(node.id);
        }
        return out.sort((a, b) => a - b);
    }
    /** Does this id name a message or timeout in the current snapshot? */
    chipKind(id) {
        if (!this.snapshot)
            return null;
        for (const inbox of Object.values(this.snapshot.inboxes)) {
            if (inbox.messages.some((m) => m.id === id))
                return "message";
            if (inbox.timeouts.some((t) => t.id === id))
                return "timeout";
        }
        return null;
    }
}
