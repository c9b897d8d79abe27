/**
 * Engine connection, transport-agnostic. A Wire moves LF-terminated
 * frame text; the client decodes inbound lines and offers typed send
 * helpers for the GUI commands. The browser glue speaks the engine's
 * WebSocket port, where every message carries the same frame bytes the
 * raw port uses.
 */
import type { Msg } from "./protocol.js";
import { decode, encode } from "./protocol.js";

export interface Wire {
  send(text: string): void;
  close(): void;
}

export interface ClientHandlers {
  onMsg(msg: Msg): void;
  onSent?(msg: Msg): void;
  onClose?(): void;
  onError?(err: Error): void;
}

export type SnapshotMode = "size" | "interval" | "values";

export class EngineClient {
  private buffer = "";

  constructor(private readonly wire: Wire,
              private readonly handlers: ClientHandlers) {}

  /** Feed raw inbound text; complete lines become messages. */
  feedText(text: string): void {
    this.buffer += text;
    for (;;) {
      const at = this.buffer.indexOf("\n");
      if (at < 0) break;
      const line = this.buffer.slice(0, at + 1);
      this.buffer = this.buffer.slice(at + 1);
      this.feedLine(line);
    }
  }

  feedLine(line: string): void {
    if (!line.trim()) return;
    let msg: Msg;
    try {
      msg = decode(line, true);
    } catch (e) {
      this.handlers.onError?.(e as Error);
      return;
    }
    this.handlers.onMsg(msg);
  }

  closed(): void {
    this.handlers.onClose?.();
  }

  private send(msg: Msg): void {
    this.wire.send(encode(msg));
    this.handlers.onSent?.(msg);
  }

  execute(goal: string): void {
    this.send({ kind: "execute", goal });
  }

  backtrack(): void {
    this.send({ kind: "backtrack" });
  }

  backtrackInteraction(): void {
    this.send({ kind: "backtrackInteraction" });
  }

  clear(): void {
    this.send({ kind: "clearCmd" });
  }

  show(mode: SnapshotMode): void {
    this.send({ kind: mode === "size" ? "showSize"
                      : mode === "interval" ? "showInterval"
                      : "showValues" });
  }

  close(): void {
    this.wire.close();
  }
}

/** Connect to the engine's WebSocket port from a browser. */
export function connectWebSocket(url: string,
                                 handlers: ClientHandlers): EngineClient {
  const sock = new WebSocket(url);
  const wire: Wire = {
    send: (text) => sock.send(text),
    close: () => sock.close(),
  };
  const client = new EngineClient(wire, handlers);
  sock.addEventListener("message", (ev) => {
    if (typeof ev.data === "string") client.feedText(ev.data);
  });
  sock.addEventListener("close", () => client.closed());
  sock.addEventListener("error", () =>
    handlers.onError?.(new Error(`websocket error on ${url}`)));
  return client;
}
