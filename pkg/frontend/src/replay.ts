/**
 * Trace replay: a recorded engine stream folded back into the same state
 * the live views build. Replay is a pure fold, so seeking to any point
 * just refolds the prefix and two replays of one trace always agree.
 */
import type { Msg } from "./protocol.js";
import { decode } from "./protocol.js";
import { SearchTree, StreamCorruptionError } from "./tree.js";
import type { ConsoleState } from "./console.js";
import { applyEngine, initialConsole } from "./console.js";
import type { FdState, RewindPolicy } from "./fdviewer.js";
import { applyFd, initialFd } from "./fdviewer.js";

/** Trace text -> decoded engine messages, one per non-empty line. */
export function parseTrace(text: string): Msg[] {
  const msgs: Msg[] = [];
  let lineno = 0;
  for (const line of text.split("\n")) {
    lineno += 1;
    if (!line) continue;
    try {
      msgs.push(decode(line, true));
    } catch (e) {
      throw new Error(`trace line ${lineno}: ${(e as Error).message}`);
    }
  }
  return msgs;
}

export interface Workspace {
  readonly console: ConsoleState;
  readonly tree: SearchTree;
  readonly fd: FdState;
}

export function emptyWorkspace(policy: RewindPolicy = "trace"): Workspace {
  return {
    console: initialConsole(),
    tree: new SearchTree(),
    fd: initialFd(policy),
  };
}

/** Fold one engine message into every view at once. */
export function applyWorkspace(ws: Workspace, msg: Msg): Workspace {
  ws.tree.apply(msg);
  return {
    console: applyEngine(ws.console, msg),
    tree: ws.tree,
    fd: applyFd(ws.fd, msg),
  };
}

export interface FoldOutcome {
  readonly ws: Workspace;
  /** Diagnostic when the stream broke its own discipline, else null. */
  readonly frozen: string | null;
}

/**
 * Like applyWorkspace, but a corrupted tree event freezes the workspace
 * instead of throwing: the state before the bad frame survives so the
 * views can stay up under a diagnostic banner.
 */
export function applyOrFreeze(ws: Workspace, msg: Msg): FoldOutcome {
  try {
    return { ws: applyWorkspace(ws, msg), frozen: null };
  } catch (e) {
    if (e instanceof StreamCorruptionError) {
      return { ws, frozen: e.message };
    }
    throw e;
  }
}

export function foldAll(msgs: readonly Msg[],
                        policy: RewindPolicy = "trace"): Workspace {
  let ws = emptyWorkspace(policy);
  for (const m of msgs) ws = applyWorkspace(ws, m);
  return ws;
}

/** The workspace after the first `upto` messages of the trace. */
export function seek(msgs: readonly Msg[], upto: number,
                     policy: RewindPolicy = "trace"): Workspace {
  return foldAll(msgs.slice(0, upto), policy);
}
