import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

export const FIXTURES =
  join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export const REPO_ROOT =
  join(dirname(fileURLToPath(import.meta.url)), "..", "..");

export function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

export interface SvgNode {
  id: number;
  classes: string[];
  title: string;
  /** Marker center for tree drawings (circle center or cross center). */
  pos?: [number, number];
  cross: boolean;
  /** x, y, width, height for treemap cells. */
  rect?: [number, number, number, number];
  /** Corner points for projected 3D cells. */
  poly?: [number, number][];
}

/** Pull every node group out of an exported or rendered drawing. */
export function parseSvgNodes(svg: string): Map<number, SvgNode> {
  const out = new Map<number, SvgNode>();
  const groupRe = /<g id="n(\d+)" class="([^"]*)">([\s\S]*?)<\/g>/g;
  for (const m of svg.matchAll(groupRe)) {
    const id = parseInt(m[1], 10);
    const body = m[3];
    const node: SvgNode = {
      id,
      classes: m[2].split(" "),
      title: /<title>([\s\S]*?)<\/title>/.exec(body)?.[1] ?? "",
      cross: body.includes('class="cross"'),
    };
    const circle = /<circle cx="([-\d.]+)" cy="([-\d.]+)"/.exec(body);
    if (circle) {
      node.pos = [parseFloat(circle[1]), parseFloat(circle[2])];
    }
    const cross =
      /<path class="cross" d="M ([-\d.]+) ([-\d.]+) L ([-\d.]+) ([-\d.]+)/
        .exec(body);
    if (cross && !node.pos) {
      node.pos = [
        (parseFloat(cross[1]) + parseFloat(cross[3])) / 2,
        (parseFloat(cross[2]) + parseFloat(cross[4])) / 2,
      ];
    }
    const poly = /<polygon [^>]*points="([^"]+)"/.exec(body);
    if (poly) {
      node.poly = poly[1].split(" ").map((p) => {
        const [x, y] = p.split(",");
        return [parseFloat(x), parseFloat(y)];
      });
    }
    const rect =
      /<rect [^>]*x="([-\d.]+)" y="([-\d.]+)" width="([-\d.]+)" height="([-\d.]+)"/
        .exec(body);
    if (rect) {
      node.rect = [
        parseFloat(rect[1]), parseFloat(rect[2]),
        parseFloat(rect[3]), parseFloat(rect[4]),
      ];
    }
    out.set(id, node);
  }
  return out;
}

export interface SceneNode {
  id: number;
  parent: number;
  kind: string;
  status: string;
  solution: boolean;
  x: number;
  y: number;
  z: number;
  label: string;
}

const SCENE_LINE =
  /^(\d+) (\d+) (\w+) (\w+) ([01]) ([-\d.]+) ([-\d.]+) ([-\d.]+) "(.*)"$/;

export function parseScene(text: string): Map<number, SceneNode> {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines[0] !== "tree-scene v1") {
    throw new Error(`bad scene header: ${lines[0]}`);
  }
  const out = new Map<number, SceneNode>();
  for (const line of lines.slice(1)) {
    const m = SCENE_LINE.exec(line);
    if (!m) throw new Error(`bad scene line: ${line}`);
    out.set(parseInt(m[1], 10), {
      id: parseInt(m[1], 10),
      parent: parseInt(m[2], 10),
      kind: m[3],
      status: m[4],
      solution: m[5] === "1",
      x: parseFloat(m[6]),
      y: parseFloat(m[7]),
      z: parseFloat(m[8]),
      label: m[9],
    });
  }
  return out;
}

export function countMatches(text: string, re: RegExp): number {
  let n = 0;
  for (const _ of text.matchAll(re)) n += 1;
  return n;
}
