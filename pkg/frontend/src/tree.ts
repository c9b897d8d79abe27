/**
 * Search tree built from the event stream, plus layout geometry.
 *
 * The tree is append-only: undo events flip a node to retracted and
 * nothing is ever deleted, so drawings show the whole exploration. All
 * four layouts ignore status (a retracted subtree keeps its exact
 * extent), which keeps redraws stable while the engine backtracks.
 *
 * The geometry here matches the engine-side exporters number for number:
 * same partition arithmetic, same traversal order, so a drawing of a
 * replayed trace lines up with a server-side export of the same trace.
 */
import type { Msg } from "./protocol.js";

export class StreamCorruptionError extends Error {}

export type NodeKind = "call" | "success";
export type NodeStatus = "active" | "retracted";

export interface TreeNode {
  id: number;
  parent: number;
  kind: NodeKind;
  label: string;
  depth: number;
  status: NodeStatus;
  solution: boolean;
}

export type Point2 = readonly [number, number];
export type Point3 = readonly [number, number, number];
/** x0, y0, x1, y1 in the unit square. */
export type Rect = readonly [number, number, number, number];

export interface Placed3 {
  readonly center: Point3;
  readonly rect: Rect;
}

export class SearchTree {
  nodes!: Map<number, TreeNode>;
  children!: Map<number, number[]>;
  /** Creation order of real node ids. */
  order!: number[];
  private stack!: number[];

  constructor() {
    this.reset();
  }

  private reset(): void {
    this.nodes = new Map();
    this.children = new Map([[0, []]]);
    this.order = [];
    this.stack = [];
  }

  get size(): number {
    return this.order.length;
  }

  node(nid: number): TreeNode {
    const n = this.nodes.get(nid);
    if (n === undefined) throw new RangeError(`no node ${nid}`);
    return n;
  }

  kids(nid: number): readonly number[] {
    return this.children.get(nid) ?? [];
  }

  apply(msg: Msg): void {
    switch (msg.kind) {
      case "node":
        this.add(msg.id, msg.parent, "call", msg.goal);
        break;
      case "child":
        this.add(msg.id, msg.parent, "success", msg.label);
        break;
      case "undoNode":
      case "undoChild": {
        const n = this.nodes.get(msg.id);
        if (n === undefined) {
          throw new StreamCorruptionError(`undo of unknown id ${msg.id}`);
        }
        n.status = "retracted";
        const at = this.stack.indexOf(n.id);
        if (at >= 0) this.stack.splice(at, 1);
        break;
      }
      case "success":
        for (let i = this.stack.length - 1; i >= 0; i--) {
          const n = this.nodes.get(this.stack[i])!;
          if (n.kind === "success") {
            n.solution = true;
            break;
          }
        }
        break;
      case "clear":
        this.reset();
        break;
      default:
        break;
    }
  }

  private add(nid: number, parent: number, kind: NodeKind,
              label: string): void {
    if (this.nodes.has(nid)) {
      throw new StreamCorruptionError(`id ${nid} reused`);
    }
    let depth: number;
    if (parent !== 0) {
      const p = this.nodes.get(parent);
      if (p === undefined || p.status !== "active") {
        throw new StreamCorruptionError(
          `parent ${parent} unknown or retracted`);
      }
      if (kind === "success" && p.kind !== "call") {
        throw new StreamCorruptionError(
          `success node ${nid} must hang off a call node`);
      }
      depth = p.depth + 1;
    } else {
      if (kind === "success") {
        throw new StreamCorruptionError(
          `success node ${nid} cannot be top-level`);
      }
      depth = 0;
    }
    this.nodes.set(nid, {
      id: nid, parent, kind, label, depth,
      status: "active", solution: false,
    });
    this.children.set(nid, []);
    this.children.get(parent)!.push(nid);
    this.order.push(nid);
    this.stack.push(nid);
  }

  static fromMessages(msgs: Iterable<Msg>): SearchTree {
    const t = new SearchTree();
    for (const m of msgs) t.apply(m);
    return t;
  }
}

/**
 * Leaves of each subtree; a childless node counts itself, dead ends and
 * retracted branches included.
 */
export function leafCounts(tree: SearchTree): Map<number, number> {
  const counts = new Map<number, number>();
  const sumKids = (kids: readonly number[]) => {
    let s = 0;
    for (const k of kids) s += counts.get(k)!;
    return s;
  };
  for (let i = tree.order.length - 1; i >= 0; i--) {
    const nid = tree.order[i];
    const kids = tree.kids(nid);
    counts.set(nid, kids.length ? sumKids(kids) : 1);
  }
  counts.set(0, sumKids(tree.kids(0)));
  return counts;
}

/**
 * Child intervals as cumulative fractions: sibling edges coincide
 * bit-exactly and the union is exactly [x0, x1].
 */
function partition(x0: number, x1: number, kids: readonly number[],
                   counts: Map<number, number>): [number, number, number][] {
  let total = 0;
  for (const k of kids) total += counts.get(k)!;
  const width = x1 - x0;
  const out: [number, number, number][] = [];
  let cum = 0;
  let left = x0;
  for (const k of kids) {
    cum += counts.get(k)!;
    const right = cum !== total ? x0 + width * (cum / total) : x1;
    out.push([k, left, right]);
    left = right;
  }
  return out;
}

/** The interval each node owns in the fixed-width layout. */
export function fixedWidthSpans(tree: SearchTree,
                                W = 1.0): Map<number, [number, number]> {
  const counts = leafCounts(tree);
  const spans = new Map<number, [number, number]>();
  const todo: [number, number, number][] = [[0, 0.0, W]];
  while (todo.length) {
    const [nid, a, b] = todo.pop()!;
    if (nid !== 0) spans.set(nid, [a, b]);
    const kids = tree.kids(nid);
    if (kids.length) {
      for (const [k, ka, kb] of partition(a, b, kids, counts)) {
        todo.push([k, ka, kb]);
      }
    }
  }
  return spans;
}

export function layoutFixedWidth(tree: SearchTree, W = 1.0,
                                 dy = 1.0): Map<number, Point2> {
  const pts = new Map<number, Point2>();
  for (const [nid, [a, b]] of fixedWidthSpans(tree, W)) {
    pts.set(nid, [(a + b) / 2, tree.node(nid).depth * dy]);
  }
  return pts;
}

export function layoutLeafSpacing(tree: SearchTree, s = 1.0,
                                  dy = 1.0): Map<number, Point2> {
  const pts = new Map<number, Point2>();
  let nextLeaf = 0;

  const place = (nid: number): void => {
    const kids = tree.kids(nid);
    let x: number;
    if (!kids.length) {
      x = nextLeaf * s;
      nextLeaf += 1;
    } else {
      for (const k of kids) place(k);
      x = (pts.get(kids[0])![0] + pts.get(kids[kids.length - 1])![0]) / 2;
    }
    pts.set(nid, [x, tree.node(nid).depth * dy]);
  };

  for (const top of tree.kids(0)) place(top);
  return pts;
}

/**
 * id -> center at z = -depth*dz plus the node's rect: rects nested
 * slice-and-dice, split axis alternating with depth. The synthetic root
 * sits one level above the real nodes and splits the unit square by the
 * same parity rule as everyone else.
 */
export function layoutAlt3d(tree: SearchTree,
                            dz = 1.0): Map<number, Placed3> {
  const counts = leafCounts(tree);
  const out = new Map<number, Placed3>();
  const todo: [number, Rect, number][] = [[0, [0.0, 0.0, 1.0, 1.0], -1]];
  while (todo.length) {
    const [nid, rect, depth] = todo.pop()!;
    const [x0, y0, x1, y1] = rect;
    if (nid !== 0) {
      out.set(nid, {
        center: [(x0 + x1) / 2, (y0 + y1) / 2, -depth * dz],
        rect,
      });
    }
    const kids = tree.kids(nid);
    if (kids.length) {
      if (depth % 2 === 0) {
        for (const [k, a, b] of partition(x0, x1, kids, counts)) {
          todo.push([k, [a, y0, b, y1], depth + 1]);
        }
      } else {
        for (const [k, a, b] of partition(y0, y1, kids, counts)) {
          todo.push([k, [x0, a, x1, b], depth + 1]);
        }
      }
    }
  }
  return out;
}

/** Leaf rects of the 3D layout: its exact vertical projection. */
export function treemapProject(tree: SearchTree): Map<number, Rect> {
  const rects = new Map<number, Rect>();
  for (const [nid, placed] of layoutAlt3d(tree)) {
    if (!tree.kids(nid).length) rects.set(nid, placed.rect);
  }
  return rects;
}

export function maxDepth(tree: SearchTree): number {
  let depth = 0;
  for (const n of tree.nodes.values()) {
    if (n.depth > depth) depth = n.depth;
  }
  return depth;
}
