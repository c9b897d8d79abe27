"""Wire codec for the engine/GUI line protocol, plus a stream validator.

One message per LF-terminated line: `<tag arg arg ...>`. Arguments are
decimal integers, double-quoted strings (escapes: \\" \\\\ \\n \\< \\>), or
`name=payload` pairs where payload is a value, an `lo..hi` interval, or a
`{v1,v2,...}` set. The `clear` tag exists in both directions, so decoding
needs to know who sent the line.

The validator enforces the discipline the tree view relies on: tree events
form a stack (every undo retracts the most recent un-undone node or child),
ids grow strictly, parents exist, and snapshot rewinds never exceed the
number of snapshots taken.
"""
from dataclasses import dataclass

MAX_FRAME_BYTES = 1 << 20


class ProtocolError(ValueError):
    pass


class FrameTooLargeError(ProtocolError):
    pass


# --- message types ---

@dataclass(frozen=True)
class Variables:
    names: tuple


@dataclass(frozen=True)
class Button:
    id: int
    text: str


@dataclass(frozen=True)
class UndoButton:
    id: int


@dataclass(frozen=True)
class Node:
    id: int
    parent: int
    goal: str


@dataclass(frozen=True)
class UndoNode:
    id: int


@dataclass(frozen=True)
class Child:
    id: int
    parent: int
    label: str


@dataclass(frozen=True)
class UndoChild:
    id: int


@dataclass(frozen=True)
class UndoGoal:
    goal: str


@dataclass(frozen=True)
class DomainSizes:
    pairs: tuple          # ((name, size), ...)


@dataclass(frozen=True)
class DomainIntervals:
    pairs: tuple          # ((name, (lo, hi)), ...)


@dataclass(frozen=True)
class DomainValues:
    pairs: tuple          # ((name, (v, ...)), ...)


@dataclass(frozen=True)
class UndoDomainValues:
    remaining: int


@dataclass(frozen=True)
class UndoDomainIntervals:
    remaining: int


@dataclass(frozen=True)
class UndoDomainSizes:
    remaining: int


@dataclass(frozen=True)
class Success:
    pass


@dataclass(frozen=True)
class Clear:
    pass


@dataclass(frozen=True)
class Error:
    text: str


@dataclass(frozen=True)
class ShowSize:
    pass


@dataclass(frozen=True)
class ShowInterval:
    pass


@dataclass(frozen=True)
class ShowValues:
    pass


@dataclass(frozen=True)
class Execute:
    goal: str


@dataclass(frozen=True)
class Backtrack:
    pass


@dataclass(frozen=True)
class BacktrackInteraction:
    pass


@dataclass(frozen=True)
class ClearCmd:
    pass


ENGINE_MESSAGES = (
    Variables, Button, UndoButton, Node, UndoNode, Child, UndoChild,
    UndoGoal, DomainSizes, DomainIntervals, DomainValues, UndoDomainValues,
    UndoDomainIntervals, UndoDomainSizes, Success, Clear, Error)
GUI_MESSAGES = (ShowSize, ShowInterval, ShowValues, Execute, Backtrack,
                BacktrackInteraction, ClearCmd)


_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "<": "\\<", ">": "\\>"}
_UNESCAPES = {'"': '"', "\\": "\\", "n": "\n", "<": "<", ">": ">"}


def _quote(s):
    out = ['"']
    for ch in s:
        out.append(_ESCAPES.get(ch, ch))
    out.append('"')
    return "".join(out)


def _pair_int(name, v):
    return "%s=%d" % (name, v)


def _pair_interval(name, lo_hi):
    return "%s=%d..%d" % (name, lo_hi[0], lo_hi[1])


def _pair_set(name, vs):
    return "%s={%s}" % (name, ",".join(str(v) for v in vs))


_TAG_OF = {
    Variables: "variables", Button: "button", UndoButton: "undo-button",
    Node: "node", UndoNode: "undo-node", Child: "child",
    UndoChild: "undo-child", UndoGoal: "undo-goal",
    DomainSizes: "domainSizes", DomainIntervals: "domainIntervals",
    DomainValues: "domainValues", UndoDomainValues: "undo-domainValues",
    UndoDomainIntervals: "undo-domainIntervals",
    UndoDomainSizes: "undo-domainSizes", Success: "success", Clear: "clear",
    Error: "error", ShowSize: "showSize", ShowInterval: "showInterval",
    ShowValues: "showValues", Execute: "execute", Backtrack: "backtrack",
    BacktrackInteraction: "backtrackInteraction", ClearCmd: "clear",
}


def encode(msg):
    """Message -> one LF-terminated frame string."""
    cls = type(msg)
    tag = _TAG_OF.get(cls)
    if tag is None:
        raise ProtocolError("not a protocol message: %r" % (msg,))
    args = []
    if cls is Variables:
        args = [_quote(n) for n in msg.names]
    elif cls is Button:
        args = [str(msg.id), _quote(msg.text)]
    elif cls in (UndoButton, UndoNode, UndoChild):
        args = [str(msg.id)]
    elif cls is Node:
        args = [str(msg.id), str(msg.parent), _quote(msg.goal)]
    elif cls is Child:
        args = [str(msg.id), str(msg.parent), _quote(msg.label)]
    elif cls is UndoGoal:
        args = [_quote(msg.goal)]
    elif cls is DomainSizes:
        args = [_pair_int(n, v) for n, v in msg.pairs]
    elif cls is DomainIntervals:
        args = [_pair_interval(n, iv) for n, iv in msg.pairs]
    elif cls is DomainValues:
        args = [_pair_set(n, vs) for n, vs in msg.pairs]
    elif cls in (UndoDomainValues, UndoDomainIntervals, UndoDomainSizes):
        args = [str(msg.remaining)]
    elif cls in (Error,):
        args = [_quote(msg.text)]
    elif cls is Execute:
        args = [_quote(msg.goal)]
    frame = "<%s>\n" % " ".join([tag] + args)
    if len(frame.encode("utf-8")) > MAX_FRAME_BYTES:
        raise FrameTooLargeError("frame exceeds %d bytes" % MAX_FRAME_BYTES)
    return frame


# --- decoding ---

def _scan_args(body, pos):
    """Yield typed arguments from the frame body after the tag."""
    out = []
    n = len(body)
    while pos < n:
        if body[pos] != " ":
            raise ProtocolError("expected space at column %d" % (pos + 1))
        pos += 1
        if pos >= n:
            raise ProtocolError("trailing space before '>'")
        ch = body[pos]
        if ch == '"':
            s, pos = _scan_qstring(body, pos)
            out.append(("q", s))
        elif ch.isdigit() or ch == "-":
            v, pos = _scan_int(body, pos)
            out.append(("i", v))
        elif ch.isalpha() or ch == "_":
            p, pos = _scan_pair(body, pos)
            out.append(("p", p))
        else:
            raise ProtocolError("bad argument at column %d" % (pos + 1))
    return out


def _scan_int(body, pos):
    start = pos
    if pos < len(body) and body[pos] == "-":
        pos += 1
    while pos < len(body) and body[pos].isdigit():
        pos += 1
    text = body[start:pos]
    if text in ("", "-"):
        raise ProtocolError("bad integer at column %d" % (start + 1))
    return int(text), pos


def _scan_qstring(body, pos):
    pos += 1  # opening quote
    out = []
    while pos < len(body):
        ch = body[pos]
        if ch == '"':
            return "".join(out), pos + 1
        if ch == "\\":
            pos += 1
            if pos >= len(body) or body[pos] not in _UNESCAPES:
                raise ProtocolError("bad escape at column %d" % pos)
            out.append(_UNESCAPES[body[pos]])
        elif ch in ("<", ">", "\n"):
            raise ProtocolError("raw %r inside quoted string" % ch)
        else:
            out.append(ch)
        pos += 1
    raise ProtocolError("unterminated quoted string")


def _scan_pair(body, pos):
    start = pos
    while pos < len(body) and (body[pos].isalnum() or body[pos] == "_"):
        pos += 1
    name = body[start:pos]
    if pos >= len(body) or body[pos] != "=":
        raise ProtocolError("expected '=' at column %d" % (pos + 1))
    pos += 1
    if pos < len(body) and body[pos] == "{":
        pos += 1
        vs = []
        while True:
            v, pos = _scan_int(body, pos)
            vs.append(v)
            if pos < len(body) and body[pos] == ",":
                pos += 1
                continue
            if pos < len(body) and body[pos] == "}":
                return (name, ("set", tuple(vs))), pos + 1
            raise ProtocolError("bad value set at column %d" % (pos + 1))
    v, pos = _scan_int(body, pos)
    if body[pos:pos + 2] == "..":
        hi, pos = _scan_int(body, pos + 2)
        return (name, ("iv", (v, hi))), pos
    return (name, ("int", v)), pos


def _want(args, kinds, tag):
    if len(args) != len(kinds) or any(a[0] != k for a, k in zip(args, kinds)):
        raise ProtocolError("bad arguments for <%s>" % tag)
    return [a[1] for a in args]


def _pairs_of(args, payload_kind, tag):
    pairs = []
    for kind, val in args:
        if kind != "p" or val[1][0] != payload_kind:
            raise ProtocolError("bad arguments for <%s>" % tag)
        pairs.append((val[0], val[1][1]))
    return tuple(pairs)


def decode(line, *, from_engine):
    """One frame line (LF optional) -> Message.

    The sender matters: `<clear>` is Clear from the engine and ClearCmd
    from the GUI.
    """
    if len(line.encode("utf-8")) > MAX_FRAME_BYTES:
        raise FrameTooLargeError("frame exceeds %d bytes" % MAX_FRAME_BYTES)
    if line.endswith("\n"):
        line = line[:-1]
    if not line.startswith("<") or not line.endswith(">"):
        raise ProtocolError("frame must look like <tag ...>")
    body = line[1:-1]
    pos = 0
    while pos < len(body) and (body[pos].isalnum() or body[pos] == "-"):
        pos += 1
    tag = body[:pos]
    if not tag:
        raise ProtocolError("missing tag")
    args = _scan_args(body, pos)

    if tag == "clear":
        if args:
            raise ProtocolError("bad arguments for <clear>")
        return Clear() if from_engine else ClearCmd()

    if from_engine:
        return _decode_engine(tag, args)
    return _decode_gui(tag, args)


def _decode_engine(tag, args):
    if tag == "variables":
        names = []
        for kind, val in args:
            if kind != "q":
                raise ProtocolError("bad arguments for <variables>")
            names.append(val)
        return Variables(tuple(names))
    if tag == "button":
        i, text = _want(args, ("i", "q"), tag)
        return Button(i, text)
    if tag == "undo-button":
        return UndoButton(*_want(args, ("i",), tag))
    if tag == "node":
        i, p, g = _want(args, ("i", "i", "q"), tag)
        return Node(i, p, g)
    if tag == "undo-node":
        return UndoNode(*_want(args, ("i",), tag))
    if tag == "child":
        i, p, l = _want(args, ("i", "i", "q"), tag)
        return Child(i, p, l)
    if tag == "undo-child":
        return UndoChild(*_want(args, ("i",), tag))
    if tag == "undo-goal":
        return UndoGoal(*_want(args, ("q",), tag))
    if tag == "domainSizes":
        return DomainSizes(_pairs_of(args, "int", tag))
    if tag == "domainIntervals":
        return DomainIntervals(_pairs_of(args, "iv", tag))
    if tag == "domainValues":
        return DomainValues(_pairs_of(args, "set", tag))
    if tag == "undo-domainValues":
        return UndoDomainValues(*_want(args, ("i",), tag))
    if tag == "undo-domainIntervals":
        return UndoDomainIntervals(*_want(args, ("i",), tag))
    if tag == "undo-domainSizes":
        return UndoDomainSizes(*_want(args, ("i",), tag))
    if tag == "success":
        _want(args, (), tag)
        return Success()
    if tag == "error":
        return Error(*_want(args, ("q",), tag))
    raise ProtocolError("unknown engine tag <%s>" % tag)


def _decode_gui(tag, args):
    if tag == "showSize":
        _want(args, (), tag)
        return ShowSize()
    if tag == "showInterval":
        _want(args, (), tag)
        return ShowInterval()
    if tag == "showValues":
        _want(args, (), tag)
        return ShowValues()
    if tag == "execute":
        return Execute(*_want(args, ("q",), tag))
    if tag == "backtrack":
        _want(args, (), tag)
        return Backtrack()
    if tag == "backtrackInteraction":
        _want(args, (), tag)
        return BacktrackInteraction()
    raise ProtocolError("unknown GUI tag <%s>" % tag)


# --- stream discipline ---

class StreamValidator:
    """Checks an engine-emitted message sequence for stack discipline.

    feed() raises ProtocolError on the first violation. The same instance
    can keep consuming across `<clear>`, which resets all state.
    """

    def __init__(self):
        self._reset()

    def _reset(self):
        self.stack = []          # ("node"|"child", id) in creation order
        self.live = {}           # id -> "node"|"child" for live entries
        self.retracted = set()
        self.max_id = 0
        self.buttons = []
        self.snapshots = 0

    def feed(self, msg):
        cls = type(msg)
        if cls is Clear:
            self._reset()
            return
        if cls is Node or cls is Child:
            if msg.id <= self.max_id:
                raise ProtocolError("id %d not increasing" % msg.id)
            if msg.parent != 0 and msg.parent not in self.live:
                raise ProtocolError("parent %d unknown or retracted"
                                    % msg.parent)
            if cls is Child and (msg.parent == 0
                                 or self.live.get(msg.parent) != "node"):
                raise ProtocolError("child %d must hang off a call node"
                                    % msg.id)
            kind = "node" if cls is Node else "child"
            self.max_id = msg.id
            self.stack.append((kind, msg.id))
            self.live[msg.id] = kind
            return
        if cls is UndoNode or cls is UndoChild:
            kind = "node" if cls is UndoNode else "child"
            if not self.stack or self.stack[-1] != (kind, msg.id):
                raise ProtocolError(
                    "<undo-%s %d> does not match the event stack top"
                    % (kind, msg.id))
            self.stack.pop()
            del self.live[msg.id]
            self.retracted.add(msg.id)
            return
        if cls is Button:
            if self.buttons and msg.id <= self.buttons[-1]:
                raise ProtocolError("button id %d not increasing" % msg.id)
            self.buttons.append(msg.id)
            return
        if cls is UndoButton:
            if not self.buttons or self.buttons[-1] != msg.id:
                raise ProtocolError("<undo-button %d> out of order" % msg.id)
            self.buttons.pop()
            return
        if cls in (DomainSizes, DomainIntervals, DomainValues):
            self.snapshots += 1
            return
        if cls in (UndoDomainValues, UndoDomainIntervals, UndoDomainSizes):
            if not 0 <= msg.remaining <= self.snapshots:
                raise ProtocolError(
                    "snapshot rewind to %d but only %d taken"
                    % (msg.remaining, self.snapshots))
            self.snapshots = msg.remaining
            return
        if cls in (Variables, UndoGoal, Success, Error):
            return
        raise ProtocolError("not an engine message: %r" % (msg,))
