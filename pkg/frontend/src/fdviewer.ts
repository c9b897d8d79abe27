/**
 * Finite-domain viewer state: the evolution of every variable's domain
 * over time, one column per snapshot the engine pushed.
 *
 * Snapshot rewinds honor the configured policy: "erase" forgets the
 * rewound columns, "trace" keeps them greyed so the abandoned part of
 * the search stays visible.
 */
import type { Interval, Msg } from "./protocol.js";

export type Snapshot =
  | { readonly mode: "size"; readonly pairs: readonly (readonly [string, number])[] }
  | { readonly mode: "interval"; readonly pairs: readonly (readonly [string, Interval])[] }
  | { readonly mode: "values"; readonly pairs: readonly (readonly [string, readonly number[]])[] };

export interface FdSlice {
  readonly snap: Snapshot;
  readonly dead: boolean;
}

export type RewindPolicy = "trace" | "erase";

export interface FdState {
  readonly names: readonly string[];
  readonly slices: readonly FdSlice[];
  /** Columns still live, the engine's snapshot-count mirror. */
  readonly live: number;
  readonly policy: RewindPolicy;
}

export function initialFd(policy: RewindPolicy = "trace"): FdState {
  return { names: [], slices: [], live: 0, policy };
}

export function withPolicy(state: FdState, policy: RewindPolicy): FdState {
  if (policy === state.policy) return state;
  const slices = policy === "erase"
    ? state.slices.filter((s) => !s.dead)
    : state.slices;
  return { ...state, policy, slices };
}

function pushSlice(state: FdState, snap: Snapshot): FdState {
  return {
    ...state,
    slices: [...state.slices, { snap, dead: false }],
    live: state.live + 1,
  };
}

function rewind(state: FdState, remaining: number): FdState {
  if (remaining >= state.live) return state;
  if (state.policy === "erase") {
    const kept: FdSlice[] = [];
    let live = 0;
    for (const s of state.slices) {
      if (s.dead) continue;
      if (live < remaining) {
        kept.push(s);
        live += 1;
      }
    }
    return { ...state, slices: kept, live };
  }
  const out = [...state.slices];
  let live = state.live;
  for (let i = out.length - 1; i >= 0 && live > remaining; i--) {
    if (!out[i].dead) {
      out[i] = { ...out[i], dead: true };
      live -= 1;
    }
  }
  return { ...state, slices: out, live };
}

export function applyFd(state: FdState, msg: Msg): FdState {
  switch (msg.kind) {
    case "variables":
      return { ...state, names: [...msg.names] };
    case "domainSizes":
      return pushSlice(state, { mode: "size", pairs: msg.pairs });
    case "domainIntervals":
      return pushSlice(state, { mode: "interval", pairs: msg.pairs });
    case "domainValues":
      return pushSlice(state, { mode: "values", pairs: msg.pairs });
    case "undoDomainSizes":
    case "undoDomainIntervals":
    case "undoDomainValues":
      return rewind(state, msg.remaining);
    case "clear":
      return { ...state, slices: [], live: 0 };
    default:
      return state;
  }
}

/** Bar height for one variable in one snapshot: how big its domain is. */
export function extentOf(snap: Snapshot, name: string): number | null {
  for (const [n, payload] of snap.pairs) {
    if (n !== name) continue;
    switch (snap.mode) {
      case "size":
        return payload as number;
      case "interval": {
        const [lo, hi] = payload as Interval;
        return hi - lo + 1;
      }
      case "values":
        return (payload as readonly number[]).length;
    }
  }
  return null;
}

/** One variable's height per column, nulls where it is not reported. */
export function series(state: FdState, name: string): (number | null)[] {
  return state.slices.map((s) => extentOf(s.snap, name));
}
