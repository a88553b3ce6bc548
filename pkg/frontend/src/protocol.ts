/** Wire shapes of the command/update channel, mirroring the server. */

export type Value =
  | null
  | boolean
  | number
  | string
  | Value[]
  | { [key: string]: Value };

export interface MessageEntry {
  id: number;
  from: string;
  type: string;
  body: Value;
}

export interface TimeoutEntry {
  id: number;
  type: string;
  body: Value;
}

export interface InboxView {
  messages: MessageEntry[];
  timeouts: TimeoutEntry[];
}

export interface Snapshot {
  states: Record<string, Value>;
  inboxes: Record<string, InboxView>;
}

export interface HistoryNode {
  id: number;
  parent: number | null;
  label: string;
  event: Value;
}

export interface Update {
  snapshot: Snapshot;
  historyDelta: HistoryNode[];
  cursor: number;
  error?: string;
}

export type Command =
  | { cmd: "deliverMessage"; id: number }
  | { cmd: "deliverTimeout"; id: number }
  | { cmd: "dropMessage"; id: number }
  | { cmd: "duplicateMessage"; id: number }
  | { cmd: "resetTo"; historyNodeId: number }
  | { cmd: "loadTrace"; path: string };
