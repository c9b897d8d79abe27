/**
 * SVG renderers. The three flat tree renderers produce the same drawing
 * the engine-side exporters do for the same tree, so replayed traces and
 * server-side exports agree. The 3D renderer projects the alternate
 * layout through the orbiting camera; at a full-vertical camera its leaf
 * cells land exactly on the treemap.
 */
import type { Camera } from "./projection.js";
import { project, toScreen } from "./projection.js";
import type { Rect, SearchTree } from "./tree.js";
import {
  layoutAlt3d, layoutFixedWidth, layoutLeafSpacing, maxDepth,
  treemapProject,
} from "./tree.js";
import type { FdState } from "./fdviewer.js";
import { extentOf } from "./fdviewer.js";

export const FIXED_W = 960.0;
export const LEAF_S = 24.0;
export const LEVEL_DY = 60.0;
export const TREEMAP_SIZE = 960.0;
export const MARGIN = 20.0;
export const VIEW3D_SIZE = 960.0;

const SVG_STYLE = `  <style>
    .edge { stroke: #888; stroke-width: 1; }
    .call { fill: #4a78b0; }
    .success { fill: #3c9d4e; }
    .retracted { opacity: 0.35; }
    .retracted.cell { fill: #b9b9b9; opacity: 1; }
    .cell { fill: #cfe0f1; stroke: #555; stroke-width: 0.5; }
    .cross { stroke: #d22; stroke-width: 2; fill: none; }
    .label { font: 9px sans-serif; fill: #222; }
  </style>`;

const STYLE_3D = `  <style>
    .edge { stroke: #888; stroke-width: 1; }
    .call { fill: #4a78b0; }
    .success { fill: #3c9d4e; }
    .retracted { opacity: 0.35; }
    .cell3d { fill: #cfe0f1; fill-opacity: 0.25; stroke: #557; stroke-width: 0.6; }
    .retracted .cell3d { fill: #b9b9b9; }
    .cross { stroke: #d22; stroke-width: 2; fill: none; }
  </style>`;

export function xmlEscape(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (v: number) => v.toFixed(6);

function svgOpen(width: number, height: number): string {
  return '<svg xmlns="http://www.w3.org/2000/svg" width="' + fmt(width) +
    '" height="' + fmt(height) + '" viewBox="0 0 ' + fmt(width) + " " +
    fmt(height) + '">';
}

export interface TreeRenderOptions {
  /** Print every node's label instead of only showing it on hover. */
  labels?: boolean;
}

function svgTree(tree: SearchTree, pts: Map<number, readonly [number, number]>,
                 width: number, height: number,
                 opts: TreeRenderOptions = {}): string {
  const lines = [svgOpen(width, height), SVG_STYLE];
  for (const nid of tree.order) {
    const n = tree.node(nid);
    if (n.parent === 0) continue;
    const [x1, y1] = pts.get(n.parent)!;
    const [x2, y2] = pts.get(nid)!;
    lines.push(`  <line class="edge" x1="${fmt(x1)}" y1="${fmt(y1)}" ` +
               `x2="${fmt(x2)}" y2="${fmt(y2)}"/>`);
  }
  for (const nid of tree.order) {
    const n = tree.node(nid);
    const [x, y] = pts.get(nid)!;
    const cls = n.kind + (n.status === "retracted" ? " retracted" : "");
    lines.push(`  <g id="n${nid}" class="${cls}">`);
    lines.push(`    <title>${xmlEscape(n.label)}</title>`);
    if (n.solution) {
      lines.push(`    <path class="cross" d="M ${fmt(x - 5)} ${fmt(y - 5)} ` +
                 `L ${fmt(x + 5)} ${fmt(y + 5)} M ${fmt(x - 5)} ` +
                 `${fmt(y + 5)} L ${fmt(x + 5)} ${fmt(y - 5)}"/>`);
    } else {
      lines.push(`    <circle cx="${fmt(x)}" cy="${fmt(y)}" r="4"/>`);
    }
    if (opts.labels) {
      lines.push(`    <text class="label" x="${fmt(x + 6)}" ` +
                 `y="${fmt(y - 6)}">${xmlEscape(n.label)}</text>`);
    }
    lines.push("  </g>");
  }
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}

function shift(pts: Map<number, readonly [number, number]>, dx: number,
               dy: number): Map<number, readonly [number, number]> {
  const out = new Map<number, readonly [number, number]>();
  for (const [nid, [x, y]] of pts) out.set(nid, [x + dx, y + dy]);
  return out;
}

export function renderFixedWidth(tree: SearchTree, W = FIXED_W,
                                 dy = LEVEL_DY,
                                 opts: TreeRenderOptions = {}): string {
  const pts = layoutFixedWidth(tree, W, dy);
  const depth = maxDepth(tree);
  return svgTree(tree, shift(pts, MARGIN, MARGIN),
                 W + 2 * MARGIN, depth * dy + 2 * MARGIN, opts);
}

export function renderLeafSpacing(tree: SearchTree, s = LEAF_S,
                                  dy = LEVEL_DY,
                                  opts: TreeRenderOptions = {}): string {
  const pts = layoutLeafSpacing(tree, s, dy);
  let span = 0.0;
  for (const [x] of pts.values()) if (x > span) span = x;
  const depth = maxDepth(tree);
  return svgTree(tree, shift(pts, MARGIN, MARGIN),
                 span + 2 * MARGIN, depth * dy + 2 * MARGIN, opts);
}

export function renderTreemap(tree: SearchTree,
                              size = TREEMAP_SIZE): string {
  const rects = treemapProject(tree);
  const lines = [svgOpen(size, size), SVG_STYLE];
  for (const nid of tree.order) {
    const rect = rects.get(nid);
    if (rect === undefined) continue;
    const n = tree.node(nid);
    const [x0, y0, x1, y1] = rect.map((v) => v * size);
    const cls = "cell" + (n.status === "retracted" ? " retracted" : "");
    lines.push(`  <g id="n${nid}" class="${cls}">`);
    lines.push(`    <title>${xmlEscape(n.label)}</title>`);
    lines.push(`    <rect class="${cls}" x="${fmt(x0)}" y="${fmt(y0)}" ` +
               `width="${fmt(x1 - x0)}" height="${fmt(y1 - y0)}"/>`);
    if (n.solution) {
      lines.push(`    <path class="cross" d="M ${fmt(x0)} ${fmt(y0)} ` +
                 `L ${fmt(x1)} ${fmt(y1)} M ${fmt(x0)} ${fmt(y1)} ` +
                 `L ${fmt(x1)} ${fmt(y0)}"/>`);
    }
    lines.push("  </g>");
  }
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}

function polyPoints(corners: [number, number][]): string {
  return corners.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
}

/**
 * The alternate 3D view through the given camera. Depths are squeezed
 * into one world unit so the whole tree fits the orbit; each node shows
 * its rect projected at its own level, solutions show a cross along the
 * rect's projected diagonals.
 */
export function render3d(tree: SearchTree, cam: Camera,
                         size = VIEW3D_SIZE): string {
  const placed = layoutAlt3d(tree);
  const depthSpan = Math.max(1, maxDepth(tree));
  const px = (x: number, y: number, z: number): [number, number] =>
    toScreen(project(x, y, z / depthSpan + 0.5, cam), cam, size);

  const centers = new Map<number, [number, number]>();
  for (const [nid, p] of placed) {
    centers.set(nid, px(p.center[0], p.center[1], p.center[2]));
  }

  const lines = [svgOpen(size, size), STYLE_3D];
  for (const nid of tree.order) {
    const n = tree.node(nid);
    if (n.parent === 0) continue;
    const [x1, y1] = centers.get(n.parent)!;
    const [x2, y2] = centers.get(nid)!;
    lines.push(`  <line class="edge" x1="${fmt(x1)}" y1="${fmt(y1)}" ` +
               `x2="${fmt(x2)}" y2="${fmt(y2)}"/>`);
  }
  for (const nid of tree.order) {
    const n = tree.node(nid);
    const { center, rect } = placed.get(nid)!;
    const [x0, y0, x1, y1] = rect as Rect;
    const z = center[2];
    const corners: [number, number][] = [
      px(x0, y0, z), px(x1, y0, z), px(x1, y1, z), px(x0, y1, z),
    ];
    const cls = n.kind + (n.status === "retracted" ? " retracted" : "");
    lines.push(`  <g id="n${nid}" class="${cls}">`);
    lines.push(`    <title>${xmlEscape(n.label)}</title>`);
    lines.push(`    <polygon class="cell3d" points="` +
               polyPoints(corners) + '"/>');
    if (n.solution) {
      const [ax, ay] = corners[0];
      const [bx, by] = corners[2];
      const [cx2, cy2] = corners[3];
      const [dx2, dy2] = corners[1];
      lines.push(`    <path class="cross" d="M ${fmt(ax)} ${fmt(ay)} ` +
                 `L ${fmt(bx)} ${fmt(by)} M ${fmt(cx2)} ${fmt(cy2)} ` +
                 `L ${fmt(dx2)} ${fmt(dy2)}"/>`);
    } else {
      const [cx, cy] = centers.get(nid)!;
      lines.push(`    <circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="3"/>`);
    }
    lines.push("  </g>");
  }
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}

const FD_ROW_H = 26;
const FD_COL_W = 7;
const FD_GUTTER = 70;

/**
 * Domain evolution as one bar row per variable, one column per snapshot.
 * Rewound columns stay as grey ghosts under the trace policy.
 */
export function renderFd(state: FdState): string {
  const rows = state.names.length;
  const cols = state.slices.length;
  const width = FD_GUTTER + Math.max(1, cols) * FD_COL_W + MARGIN;
  const height = Math.max(1, rows) * FD_ROW_H + MARGIN;
  const lines = [svgOpen(width, height)];
  lines.push(`  <style>
    .fd-bar { fill: #4a78b0; }
    .fd-bar.dead { fill: #b9b9b9; }
    .fd-name { font: 11px sans-serif; fill: #333; }
    .fd-base { stroke: #ccc; stroke-width: 0.5; }
  </style>`);
  state.names.forEach((name, r) => {
    const top = MARGIN / 2 + r * FD_ROW_H;
    const base = top + FD_ROW_H - 4;
    let peak = 1;
    for (const s of state.slices) {
      const e = extentOf(s.snap, name);
      if (e !== null && e > peak) peak = e;
    }
    lines.push(`  <text class="fd-name" x="4" y="${fmt(base)}">` +
               `${xmlEscape(name)}</text>`);
    lines.push(`  <line class="fd-base" x1="${fmt(FD_GUTTER - 4)}" ` +
               `y1="${fmt(base)}" x2="${fmt(width - MARGIN / 2)}" ` +
               `y2="${fmt(base)}"/>`);
    state.slices.forEach((s, c) => {
      const e = extentOf(s.snap, name);
      if (e === null) return;
      const h = ((FD_ROW_H - 8) * e) / peak;
      const cls = s.dead ? "fd-bar dead" : "fd-bar";
      lines.push(`  <rect class="${cls}" x="${fmt(FD_GUTTER + c * FD_COL_W)}"` +
                 ` y="${fmt(base - h)}" width="${FD_COL_W - 2}" ` +
                 `height="${fmt(h)}"><title>${xmlEscape(name)} @${c}: ` +
                 `${e}${s.dead ? " (rewound)" : ""}</title></rect>`);
    });
  });
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}
