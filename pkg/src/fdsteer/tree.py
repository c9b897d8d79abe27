"""Search tree built from the event stream, layout geometry, exporters.

The tree is append-only: undo events flip a node to retracted and nothing
is ever deleted, so post-mortem drawings show the whole exploration. All
four layouts ignore status (a retracted subtree keeps its exact extent),
which keeps redraws stable while the engine backtracks.

Geometry convention: real nodes are at depth 0 for top-level calls. The
synthetic root (id 0) sits one level above and, in the 3D layout, splits
the unit square by the same parity rule as everyone else.
"""
from dataclasses import dataclass

from . import protocol as P


class StreamCorruptionError(ValueError):
    pass


class UnsupportedFormatError(ValueError):
    pass


CALL = "call"
SUCCESS = "success"


@dataclass
class TreeNode:
    id: int
    parent: int
    kind: str               # CALL | SUCCESS
    label: str
    depth: int
    status: str = "active"  # "active" | "retracted"
    solution: bool = False


class SearchTree:
    """Folds protocol messages into a tree; non-tree messages are ignored,
    so a whole trace can be fed as-is."""

    def __init__(self):
        self._reset()

    def _reset(self):
        self.nodes = {}
        self.children = {0: []}
        self.order = []         # creation order of real node ids
        self._stack = []        # live ids, push/pop with the event stack

    def __len__(self):
        return len(self.order)

    def node(self, nid):
        return self.nodes[nid]

    def apply(self, msg):
        if isinstance(msg, P.Node):
            self._add(msg.id, msg.parent, CALL, msg.goal)
        elif isinstance(msg, P.Child):
            self._add(msg.id, msg.parent, SUCCESS, msg.label)
        elif isinstance(msg, (P.UndoNode, P.UndoChild)):
            n = self.nodes.get(msg.id)
            if n is None:
                raise StreamCorruptionError("undo of unknown id %d"
                                            % msg.id)
            n.status = "retracted"
            if n.id in self._stack:
                self._stack.remove(n.id)
        elif isinstance(msg, P.Success):
            for nid in reversed(self._stack):
                if self.nodes[nid].kind == SUCCESS:
                    self.nodes[nid].solution = True
                    break
        elif isinstance(msg, P.Clear):
            self._reset()

    def _add(self, nid, parent, kind, label):
        if nid in self.nodes:
            raise StreamCorruptionError("id %d reused" % nid)
        if parent != 0:
            p = self.nodes.get(parent)
            if p is None or p.status != "active":
                raise StreamCorruptionError("parent %d unknown or retracted"
                                            % parent)
            if kind == SUCCESS and p.kind != CALL:
                raise StreamCorruptionError(
                    "success node %d must hang off a call node" % nid)
            depth = p.depth + 1
        else:
            if kind == SUCCESS:
                raise StreamCorruptionError(
                    "success node %d cannot be top-level" % nid)
            depth = 0
        self.nodes[nid] = TreeNode(nid, parent, kind, label, depth)
        self.children[nid] = []
        self.children[parent].append(nid)
        self.order.append(nid)
        self._stack.append(nid)

    @classmethod
    def from_messages(cls, msgs):
        t = cls()
        for m in msgs:
            t.apply(m)
        return t


def leaf_counts(tree):
    """Leaves of each subtree; a childless node counts itself, dead ends
    and retracted branches included."""
    counts = {}
    for nid in reversed(tree.order):
        kids = tree.children[nid]
        counts[nid] = sum(counts[k] for k in kids) if kids else 1
    counts[0] = sum(counts[k] for k in tree.children[0])
    return counts


def _partition(x0, x1, kids, counts):
    """Child intervals as cumulative fractions: sibling edges coincide
    bit-exactly and the union is exactly [x0, x1]."""
    total = sum(counts[k] for k in kids)
    width = x1 - x0
    out = []
    cum = 0
    left = x0
    for k in kids:
        cum += counts[k]
        right = x0 + width * (cum / total) if cum != total else x1
        out.append((k, left, right))
        left = right
    return out


def fixed_width_spans(tree, W=1.0):
    """The interval each node owns in the fixed-width layout."""
    counts = leaf_counts(tree)
    spans = {}
    todo = [(0, 0.0, W)]
    while todo:
        nid, a, b = todo.pop()
        if nid != 0:
            spans[nid] = (a, b)
        kids = tree.children[nid]
        if kids:
            for k, ka, kb in _partition(a, b, kids, counts):
                todo.append((k, ka, kb))
    return spans


def layout_fixed_width(tree, W=1.0, dy=1.0):
    pts = {}
    for nid, (a, b) in fixed_width_spans(tree, W).items():
        pts[nid] = ((a + b) / 2, tree.nodes[nid].depth * dy)
    return pts


def layout_leaf_spacing(tree, s=1.0, dy=1.0):
    pts = {}
    next_leaf = [0]

    def place(nid):
        kids = tree.children[nid]
        if not kids:
            x = next_leaf[0] * s
            next_leaf[0] += 1
        else:
            for k in kids:
                place(k)
            x = (pts[kids[0]][0] + pts[kids[-1]][0]) / 2
        pts[nid] = (x, tree.nodes[nid].depth * dy)

    for top in tree.children[0]:
        place(top)
    return pts


def layout_alt3d(tree, dz=1.0):
    """id -> ((x, y, z), (x0, y0, x1, y1)): rect center at z = -depth*dz,
    rects nested slice-and-dice, split axis alternating with depth."""
    counts = leaf_counts(tree)
    out = {}
    todo = [(0, (0.0, 0.0, 1.0, 1.0), -1)]
    while todo:
        nid, rect, depth = todo.pop()
        if nid != 0:
            x0, y0, x1, y1 = rect
            out[nid] = (((x0 + x1) / 2, (y0 + y1) / 2, -depth * dz), rect)
        kids = tree.children[nid]
        if kids:
            x0, y0, x1, y1 = rect
            if depth % 2 == 0:
                for k, a, b in _partition(x0, x1, kids, counts):
                    todo.append((k, (a, y0, b, y1), depth + 1))
            else:
                for k, a, b in _partition(y0, y1, kids, counts):
                    todo.append((k, (x0, a, x1, b), depth + 1))
    return out


def treemap_project(tree):
    """Leaf rects of the 3D layout: its exact vertical projection."""
    placed = layout_alt3d(tree)
    return {nid: rect for nid, (_, rect) in placed.items()
            if not tree.children[nid]}


# --- exporters ---

FIXED_W = 960.0
LEAF_S = 24.0
LEVEL_DY = 60.0
TREEMAP_SIZE = 960.0
MARGIN = 20.0

_SVG_STYLE = """\
  <style>
    .edge { stroke: #888; stroke-width: 1; }
    .call { fill: #4a78b0; }
    .success { fill: #3c9d4e; }
    .retracted { opacity: 0.35; }
    .retracted.cell { fill: #b9b9b9; opacity: 1; }
    .cell { fill: #cfe0f1; stroke: #555; stroke-width: 0.5; }
    .cross { stroke: #d22; stroke-width: 2; fill: none; }
  </style>
"""


def _xml_escape(text):
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _fmt(v):
    return "%.6f" % v


def _svg_tree(tree, pts, width, height):
    lines = ['<svg xmlns="http://www.w3.org/2000/svg" width="%s" '
             'height="%s" viewBox="0 0 %s %s">'
             % (_fmt(width), _fmt(height), _fmt(width), _fmt(height))]
    lines.append(_SVG_STYLE.rstrip("\n"))
    for nid in tree.order:
        n = tree.nodes[nid]
        if n.parent == 0:
            continue
        x1, y1 = pts[n.parent]
        x2, y2 = pts[nid]
        lines.append('  <line class="edge" x1="%s" y1="%s" x2="%s" y2="%s"/>'
                     % (_fmt(x1), _fmt(y1), _fmt(x2), _fmt(y2)))
    for nid in tree.order:
        n = tree.nodes[nid]
        x, y = pts[nid]
        cls = n.kind + (" retracted" if n.status == "retracted" else "")
        parts = ['  <g id="n%d" class="%s">' % (nid, cls),
                 '    <title>%s</title>' % _xml_escape(n.label)]
        if n.solution:
            parts.append('    <path class="cross" d="M %s %s L %s %s '
                         'M %s %s L %s %s"/>'
                         % (_fmt(x - 5), _fmt(y - 5), _fmt(x + 5),
                            _fmt(y + 5), _fmt(x - 5), _fmt(y + 5),
                            _fmt(x + 5), _fmt(y - 5)))
        else:
            parts.append('    <circle cx="%s" cy="%s" r="4"/>'
                         % (_fmt(x), _fmt(y)))
        parts.append('  </g>')
        lines.extend(parts)
    lines.append('</svg>')
    return "\n".join(lines) + "\n"


def _shift(pts, dx, dy):
    return {nid: (x + dx, y + dy) for nid, (x, y) in pts.items()}


def export_svg_fixed_width(tree, W=FIXED_W, dy=LEVEL_DY):
    pts = layout_fixed_width(tree, W, dy)
    depth = max((n.depth for n in tree.nodes.values()), default=0)
    return _svg_tree(tree, _shift(pts, MARGIN, MARGIN),
                     W + 2 * MARGIN, depth * dy + 2 * MARGIN)


def export_svg_leaf_spacing(tree, s=LEAF_S, dy=LEVEL_DY):
    pts = layout_leaf_spacing(tree, s, dy)
    span = max((x for x, _ in pts.values()), default=0.0)
    depth = max((n.depth for n in tree.nodes.values()), default=0)
    return _svg_tree(tree, _shift(pts, MARGIN, MARGIN),
                     span + 2 * MARGIN, depth * dy + 2 * MARGIN)


def export_svg_treemap(tree, size=TREEMAP_SIZE):
    rects = treemap_project(tree)
    lines = ['<svg xmlns="http://www.w3.org/2000/svg" width="%s" '
             'height="%s" viewBox="0 0 %s %s">'
             % (_fmt(size), _fmt(size), _fmt(size), _fmt(size))]
    lines.append(_SVG_STYLE.rstrip("\n"))
    for nid in tree.order:
        if nid not in rects:
            continue
        n = tree.nodes[nid]
        x0, y0, x1, y1 = [v * size for v in rects[nid]]
        cls = "cell" + (" retracted" if n.status == "retracted" else "")
        lines.append('  <g id="n%d" class="%s">' % (nid, cls))
        lines.append('    <title>%s</title>' % _xml_escape(n.label))
        lines.append('    <rect class="%s" x="%s" y="%s" width="%s" '
                     'height="%s"/>'
                     % (cls, _fmt(x0), _fmt(y0), _fmt(x1 - x0),
                        _fmt(y1 - y0)))
        if n.solution:
            lines.append('    <path class="cross" d="M %s %s L %s %s '
                         'M %s %s L %s %s"/>'
                         % (_fmt(x0), _fmt(y0), _fmt(x1), _fmt(y1),
                            _fmt(x0), _fmt(y1), _fmt(x1), _fmt(y0)))
        lines.append('  </g>')
    lines.append('</svg>')
    return "\n".join(lines) + "\n"


def export_scene(tree, dz=1.0):
    placed = layout_alt3d(tree, dz)
    lines = ["tree-scene v1"]
    for nid in tree.order:
        n = tree.nodes[nid]
        (x, y, z), _ = placed[nid]
        label = n.label.replace("\\", "\\\\").replace('"', '\\"') \
                       .replace("\n", "\\n")
        lines.append('%d %d %s %s %d %s %s %s "%s"'
                     % (nid, n.parent, n.kind, n.status,
                        1 if n.solution else 0,
                        _fmt(x), _fmt(y), _fmt(z), label))
    return "\n".join(lines) + "\n"


LAYOUTS = ("fixed-width", "leaf-spacing", "alt3d", "treemap")
FORMATS = ("svg", "scene")


def export(tree, layout, fmt):
    if layout not in LAYOUTS or fmt not in FORMATS:
        raise UnsupportedFormatError("unknown %s/%s" % (layout, fmt))
    if fmt == "svg":
        if layout == "fixed-width":
            return export_svg_fixed_width(tree)
        if layout == "leaf-spacing":
            return export_svg_leaf_spacing(tree)
        if layout == "treemap":
            return export_svg_treemap(tree)
        raise UnsupportedFormatError(
            "no flat rendering for the 3D layout; use the scene format")
    if layout != "alt3d":
        raise UnsupportedFormatError(
            "scene output is only defined for the alt3d layout")
    return export_scene(tree)
