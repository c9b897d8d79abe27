import { describe, expect, it } from "vitest";

import type { Msg } from "../src/protocol";
import { ProtocolError, decode, encode } from "../src/protocol";
import { fixture } from "./helpers";

const GUI_KINDS = new Set([
  "showSize", "showInterval", "showValues", "execute", "backtrack",
  "backtrackInteraction", "clearCmd",
]);

describe("frame decoding", () => {
  it("decodes every line of a recorded queens run", () => {
    const lines = fixture("queens8.trace").split("\n")
      .filter((l) => l.length > 0);
    const byKind = new Map<string, number>();
    for (const line of lines) {
      const msg = decode(line, true);
      byKind.set(msg.kind, (byKind.get(msg.kind) ?? 0) + 1);
    }
    expect(byKind.get("variables")).toBe(1);
    expect(byKind.get("button")).toBe(10);
    expect(byKind.get("node")).toBe(577);
    expect(byKind.get("child")).toBe(668);
    expect(byKind.get("success")).toBe(92);
  });

  it("round-trips every recorded frame through encode", () => {
    const lines = fixture("queens8.trace").split("\n")
      .filter((l) => l.length > 0);
    for (const line of lines) {
      const msg = decode(line, true);
      expect(encode(msg)).toBe(line + "\n");
      expect(decode(encode(msg), true)).toEqual(msg);
    }
  });

  it("round-trips awkward strings", () => {
    const nasty = 'a "b" \\ c <d> e\nf';
    const cases: Msg[] = [
      { kind: "execute", goal: nasty },
      { kind: "error", text: nasty },
      { kind: "node", id: 3, parent: 2, goal: nasty },
      { kind: "variables", names: [nasty, "plain"] },
      { kind: "domainValues", pairs: [["X", [-3, 0, 7]]] },
      { kind: "domainIntervals", pairs: [["X", [-5, 12]], ["Y", [0, 0]]] },
      { kind: "undoDomainSizes", remaining: 0 },
    ];
    for (const msg of cases) {
      const fromEngine = !GUI_KINDS.has(msg.kind);
      expect(decode(encode(msg), fromEngine)).toEqual(msg);
    }
  });

  it("is direction sensitive for <clear>", () => {
    expect(decode("<clear>\n", true)).toEqual({ kind: "clear" });
    expect(decode("<clear>\n", false)).toEqual({ kind: "clearCmd" });
  });

  it("rejects engine tags arriving from the GUI side", () => {
    expect(() => decode('<node 1 0 "g">', false)).toThrow(ProtocolError);
    expect(() => decode("<success>", false)).toThrow(ProtocolError);
  });

  it("rejects malformed frames", () => {
    const bad = [
      "no brackets",
      "<>",
      "<node 1 0>",
      '<node x 0 "g">',
      '<button 1 "unterminated>',
      "<domainSizes X=>",
      "<domainSizes X={1,>",
      '<execute "a" trailing junk>',
      "<unknowntag 1>",
    ];
    for (const line of bad) {
      expect(() => decode(line, true)).toThrow(ProtocolError);
    }
  });
});
