/**
 * Wire codec for the engine/GUI line protocol.
 *
 * One message per LF-terminated line: `<tag arg arg ...>`. Arguments are
 * decimal integers, double-quoted strings (escapes: \" \\ \n \< \>), or
 * `name=payload` pairs where payload is a value, an `lo..hi` interval, or
 * a `{v1,v2,...}` set. The `clear` tag exists in both directions, so
 * decoding needs to know who sent the line.
 */

export const MAX_FRAME_BYTES = 1 << 20;

export class ProtocolError extends Error {}

export class FrameTooLargeError extends ProtocolError {}

export type Interval = readonly [number, number];

export type Msg =
  | { readonly kind: "variables"; readonly names: readonly string[] }
  | { readonly kind: "button"; readonly id: number; readonly text: string }
  | { readonly kind: "undoButton"; readonly id: number }
  | { readonly kind: "node"; readonly id: number; readonly parent: number;
      readonly goal: string }
  | { readonly kind: "undoNode"; readonly id: number }
  | { readonly kind: "child"; readonly id: number; readonly parent: number;
      readonly label: string }
  | { readonly kind: "undoChild"; readonly id: number }
  | { readonly kind: "undoGoal"; readonly goal: string }
  | { readonly kind: "domainSizes";
      readonly pairs: readonly (readonly [string, number])[] }
  | { readonly kind: "domainIntervals";
      readonly pairs: readonly (readonly [string, Interval])[] }
  | { readonly kind: "domainValues";
      readonly pairs: readonly (readonly [string, readonly number[]])[] }
  | { readonly kind: "undoDomainValues"; readonly remaining: number }
  | { readonly kind: "undoDomainIntervals"; readonly remaining: number }
  | { readonly kind: "undoDomainSizes"; readonly remaining: number }
  | { readonly kind: "success" }
  | { readonly kind: "clear" }
  | { readonly kind: "error"; readonly text: string }
  | { readonly kind: "showSize" }
  | { readonly kind: "showInterval" }
  | { readonly kind: "showValues" }
  | { readonly kind: "execute"; readonly goal: string }
  | { readonly kind: "backtrack" }
  | { readonly kind: "backtrackInteraction" }
  | { readonly kind: "clearCmd" };

export type EngineMsg = Extract<Msg, { kind:
  "variables" | "button" | "undoButton" | "node" | "undoNode" | "child" |
  "undoChild" | "undoGoal" | "domainSizes" | "domainIntervals" |
  "domainValues" | "undoDomainValues" | "undoDomainIntervals" |
  "undoDomainSizes" | "success" | "clear" | "error" }>;

export type GuiMsg = Extract<Msg, { kind:
  "showSize" | "showInterval" | "showValues" | "execute" | "backtrack" |
  "backtrackInteraction" | "clearCmd" }>;

const ESCAPES: Record<string, string> = {
  '"': '\\"', "\\": "\\\\", "\n": "\\n", "<": "\\<", ">": "\\>",
};
const UNESCAPES: Record<string, string> = {
  '"': '"', "\\": "\\", n: "\n", "<": "<", ">": ">",
};

const utf8 = new TextEncoder();

function quote(s: string): string {
  let out = '"';
  for (const ch of s) out += ESCAPES[ch] ?? ch;
  return out + '"';
}

const TAG_OF: Record<Msg["kind"], string> = {
  variables: "variables", button: "button", undoButton: "undo-button",
  node: "node", undoNode: "undo-node", child: "child",
  undoChild: "undo-child", undoGoal: "undo-goal",
  domainSizes: "domainSizes", domainIntervals: "domainIntervals",
  domainValues: "domainValues", undoDomainValues: "undo-domainValues",
  undoDomainIntervals: "undo-domainIntervals",
  undoDomainSizes: "undo-domainSizes", success: "success", clear: "clear",
  error: "error", showSize: "showSize", showInterval: "showInterval",
  showValues: "showValues", execute: "execute", backtrack: "backtrack",
  backtrackInteraction: "backtrackInteraction", clearCmd: "clear",
};

/** Message -> one LF-terminated frame string. */
export function encode(msg: Msg): string {
  const tag = TAG_OF[msg.kind];
  if (tag === undefined) {
    throw new ProtocolError(`not a protocol message: ${JSON.stringify(msg)}`);
  }
  let args: string[] = [];
  switch (msg.kind) {
    case "variables":
      args = msg.names.map(quote);
      break;
    case "button":
      args = [String(msg.id), quote(msg.text)];
      break;
    case "undoButton":
    case "undoNode":
    case "undoChild":
      args = [String(msg.id)];
      break;
    case "node":
      args = [String(msg.id), String(msg.parent), quote(msg.goal)];
      break;
    case "child":
      args = [String(msg.id), String(msg.parent), quote(msg.label)];
      break;
    case "undoGoal":
      args = [quote(msg.goal)];
      break;
    case "domainSizes":
      args = msg.pairs.map(([n, v]) => `${n}=${v}`);
      break;
    case "domainIntervals":
      args = msg.pairs.map(([n, [lo, hi]]) => `${n}=${lo}..${hi}`);
      break;
    case "domainValues":
      args = msg.pairs.map(([n, vs]) => `${n}={${vs.join(",")}}`);
      break;
    case "undoDomainValues":
    case "undoDomainIntervals":
    case "undoDomainSizes":
      args = [String(msg.remaining)];
      break;
    case "error":
      args = [quote(msg.text)];
      break;
    case "execute":
      args = [quote(msg.goal)];
      break;
    default:
      break;
  }
  const frame = `<${[tag, ...args].join(" ")}>\n`;
  if (utf8.encode(frame).length > MAX_FRAME_BYTES) {
    throw new FrameTooLargeError(`frame exceeds ${MAX_FRAME_BYTES} bytes`);
  }
  return frame;
}

// --- decoding ---

type Payload =
  | { t: "int"; v: number }
  | { t: "iv"; v: Interval }
  | { t: "set"; v: number[] };

type Arg =
  | { k: "q"; v: string }
  | { k: "i"; v: number }
  | { k: "p"; v: [string, Payload] };

const isDigit = (ch: string) => ch >= "0" && ch <= "9";
const isAlpha = (ch: string) =>
  (ch >= "a" && ch <= "z") || (ch >= "A" && ch <= "Z");
const isAlnum = (ch: string) => isAlpha(ch) || isDigit(ch);

function scanInt(body: string, pos: number): [number, number] {
  const start = pos;
  if (pos < body.length && body[pos] === "-") pos += 1;
  while (pos < body.length && isDigit(body[pos])) pos += 1;
  const text = body.slice(start, pos);
  if (text === "" || text === "-") {
    throw new ProtocolError(`bad integer at column ${start + 1}`);
  }
  return [parseInt(text, 10), pos];
}

function scanQstring(body: string, pos: number): [string, number] {
  pos += 1; // opening quote
  let out = "";
  while (pos < body.length) {
    const ch = body[pos];
    if (ch === '"') return [out, pos + 1];
    if (ch === "\\") {
      pos += 1;
      const esc = pos < body.length ? UNESCAPES[body[pos]] : undefined;
      if (esc === undefined) {
        throw new ProtocolError(`bad escape at column ${pos}`);
      }
      out += esc;
    } else if (ch === "<" || ch === ">" || ch === "\n") {
      throw new ProtocolError(`raw ${JSON.stringify(ch)} inside quoted string`);
    } else {
      out += ch;
    }
    pos += 1;
  }
  throw new ProtocolError("unterminated quoted string");
}

function scanPair(body: string, pos: number): [[string, Payload], number] {
  const start = pos;
  while (pos < body.length && (isAlnum(body[pos]) || body[pos] === "_")) {
    pos += 1;
  }
  const name = body.slice(start, pos);
  if (pos >= body.length || body[pos] !== "=") {
    throw new ProtocolError(`expected '=' at column ${pos + 1}`);
  }
  pos += 1;
  if (pos < body.length && body[pos] === "{") {
    pos += 1;
    const vs: number[] = [];
    for (;;) {
      let v: number;
      [v, pos] = scanInt(body, pos);
      vs.push(v);
      if (pos < body.length && body[pos] === ",") {
        pos += 1;
        continue;
      }
      if (pos < body.length && body[pos] === "}") {
        return [[name, { t: "set", v: vs }], pos + 1];
      }
      throw new ProtocolError(`bad value set at column ${pos + 1}`);
    }
  }
  let v: number;
  [v, pos] = scanInt(body, pos);
  if (body.slice(pos, pos + 2) === "..") {
    let hi: number;
    [hi, pos] = scanInt(body, pos + 2);
    return [[name, { t: "iv", v: [v, hi] }], pos];
  }
  return [[name, { t: "int", v }], pos];
}

function scanArgs(body: string, pos: number): Arg[] {
  const out: Arg[] = [];
  const n = body.length;
  while (pos < n) {
    if (body[pos] !== " ") {
      throw new ProtocolError(`expected space at column ${pos + 1}`);
    }
    pos += 1;
    if (pos >= n) throw new ProtocolError("trailing space before '>'");
    const ch = body[pos];
    if (ch === '"') {
      let s: string;
      [s, pos] = scanQstring(body, pos);
      out.push({ k: "q", v: s });
    } else if (isDigit(ch) || ch === "-") {
      let v: number;
      [v, pos] = scanInt(body, pos);
      out.push({ k: "i", v });
    } else if (isAlpha(ch) || ch === "_") {
      let p: [string, Payload];
      [p, pos] = scanPair(body, pos);
      out.push({ k: "p", v: p });
    } else {
      throw new ProtocolError(`bad argument at column ${pos + 1}`);
    }
  }
  return out;
}

function want(args: Arg[], kinds: string[], tag: string): (string | number)[] {
  if (args.length !== kinds.length ||
      args.some((a, i) => a.k !== kinds[i])) {
    throw new ProtocolError(`bad arguments for <${tag}>`);
  }
  return args.map((a) => a.v as string | number);
}

function pairsOf<T>(args: Arg[], payloadKind: Payload["t"],
                    tag: string): [string, T][] {
  const pairs: [string, T][] = [];
  for (const a of args) {
    if (a.k !== "p" || a.v[1].t !== payloadKind) {
      throw new ProtocolError(`bad arguments for <${tag}>`);
    }
    pairs.push([a.v[0], a.v[1].v as T]);
  }
  return pairs;
}

/**
 * One frame line (LF optional) -> Msg.
 *
 * The sender matters: `<clear>` is "clear" from the engine and "clearCmd"
 * from the GUI.
 */
export function decode(line: string, fromEngine: boolean): Msg {
  if (utf8.encode(line).length > MAX_FRAME_BYTES) {
    throw new FrameTooLargeError(`frame exceeds ${MAX_FRAME_BYTES} bytes`);
  }
  if (line.endsWith("\n")) line = line.slice(0, -1);
  if (!line.startsWith("<") || !line.endsWith(">")) {
    throw new ProtocolError("frame must look like <tag ...>");
  }
  const body = line.slice(1, -1);
  let pos = 0;
  while (pos < body.length && (isAlnum(body[pos]) || body[pos] === "-")) {
    pos += 1;
  }
  const tag = body.slice(0, pos);
  if (!tag) throw new ProtocolError("missing tag");
  const args = scanArgs(body, pos);

  if (tag === "clear") {
    if (args.length) throw new ProtocolError("bad arguments for <clear>");
    return fromEngine ? { kind: "clear" } : { kind: "clearCmd" };
  }
  return fromEngine ? decodeEngine(tag, args) : decodeGui(tag, args);
}

function decodeEngine(tag: string, args: Arg[]): EngineMsg {
  switch (tag) {
    case "variables": {
      const names: string[] = [];
      for (const a of args) {
        if (a.k !== "q") {
          throw new ProtocolError("bad arguments for <variables>");
        }
        names.push(a.v);
      }
      return { kind: "variables", names };
    }
    case "button": {
      const [id, text] = want(args, ["i", "q"], tag);
      return { kind: "button", id: id as number, text: text as string };
    }
    case "undo-button":
      return { kind: "undoButton",
               id: want(args, ["i"], tag)[0] as number };
    case "node": {
      const [id, parent, goal] = want(args, ["i", "i", "q"], tag);
      return { kind: "node", id: id as number, parent: parent as number,
               goal: goal as string };
    }
    case "undo-node":
      return { kind: "undoNode", id: want(args, ["i"], tag)[0] as number };
    case "child": {
      const [id, parent, label] = want(args, ["i", "i", "q"], tag);
      return { kind: "child", id: id as number, parent: parent as number,
               label: label as string };
    }
    case "undo-child":
      return { kind: "undoChild", id: want(args, ["i"], tag)[0] as number };
    case "undo-goal":
      return { kind: "undoGoal",
               goal: want(args, ["q"], tag)[0] as string };
    case "domainSizes":
      return { kind: "domainSizes",
               pairs: pairsOf<number>(args, "int", tag) };
    case "domainIntervals":
      return { kind: "domainIntervals",
               pairs: pairsOf<Interval>(args, "iv", tag) };
    case "domainValues":
      return { kind: "domainValues",
               pairs: pairsOf<number[]>(args, "set", tag) };
    case "undo-domainValues":
      return { kind: "undoDomainValues",
               remaining: want(args, ["i"], tag)[0] as number };
    case "undo-domainIntervals":
      return { kind: "undoDomainIntervals",
               remaining: want(args, ["i"], tag)[0] as number };
    case "undo-domainSizes":
      return { kind: "undoDomainSizes",
               remaining: want(args, ["i"], tag)[0] as number };
    case "success":
      want(args, [], tag);
      return { kind: "success" };
    case "error":
      return { kind: "error", text: want(args, ["q"], tag)[0] as string };
    default:
      throw new ProtocolError(`unknown engine tag <${tag}>`);
  }
}

function decodeGui(tag: string, args: Arg[]): GuiMsg {
  switch (tag) {
    case "showSize":
      want(args, [], tag);
      return { kind: "showSize" };
    case "showInterval":
      want(args, [], tag);
      return { kind: "showInterval" };
    case "showValues":
      want(args, [], tag);
      return { kind: "showValues" };
    case "execute":
      return { kind: "execute",
               goal: want(args, ["q"], tag)[0] as string };
    case "backtrack":
      want(args, [], tag);
      return { kind: "backtrack" };
    case "backtrackInteraction":
      want(args, [], tag);
      return { kind: "backtrackInteraction" };
    default:
      throw new ProtocolError(`unknown GUI tag <${tag}>`);
  }
}
