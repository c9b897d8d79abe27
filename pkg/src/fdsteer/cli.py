"""Command line: run models headless, serve sessions, export trace files.

Exit codes: 0 success, 1 goal or trace errors, 2 unreadable input files,
3 bind failure in serve mode.
"""

import argparse
import os
import sys

from . import domains
from . import protocol as P
from . import server as server_mod
from . import tree as tree_mod
from .goals import Model, ModelFormatError, parse_model
from .session import AT_SUCCESS, INTERVAL, SIZE, VALUES, Session

DEFAULT_PORT = 8760

SNAPSHOT_MODES = (SIZE, INTERVAL, VALUES)


class CliError(Exception):
    def __init__(self, message, status=1):
        super().__init__(message)
        self.status = status


# --- shared plumbing ---

def _load_model(path, n=None):
    if path is None:
        return Model()
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise CliError("cannot read model: %s" % e, status=2)
    overrides = {} if n is None else {"N": n}
    try:
        return parse_model(text, overrides)
    except ModelFormatError as e:
        raise CliError("bad model file: %s" % e)


def _split_goals(text):
    """Split on commas that sit outside brackets and parentheses."""
    items = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == "," and depth == 0:
            items.append(text[start:i].strip())
            start = i + 1
    items.append(text[start:].strip())
    return [x for x in items if x]


def _resolve_goal(item, buttons):
    """An item names a button by unique prefix or stands as goal text."""
    if item in buttons:
        return item
    hits = [b for b in buttons if b.startswith(item)]
    if len(hits) == 1:
        return hits[0]
    if len(hits) > 1:
        raise CliError("goal %r matches %d buttons" % (item, len(hits)))
    return item


def _goal_text(args, model):
    if args.goals == "all-buttons":
        parts = list(model.buttons)
        if not parts:
            raise CliError("model has no buttons")
    else:
        parts = [_resolve_goal(item, model.buttons)
                 for item in _split_goals(args.goals)]
        if not parts:
            raise CliError("empty goal list")
    return ", ".join(parts)


def _bindings(session):
    out = []
    for name, disp in session.model.varnames:
        d = session.store.dom(session.store.vid_of(name))
        if domains.size(d) == 1:
            out.append("%s=%d" % (disp, domains.dmin(d)))
    return " ".join(out)


# --- run ---

def cmd_run(args, out=None):
    out = sys.stdout if out is None else out
    model = _load_model(args.model, args.n)
    goal = _goal_text(args, model)
    messages = []
    session = Session(model, sink=messages.append,
                      trace_failures=args.trace_failures)
    session.start()
    if args.snapshot != SIZE:
        session.set_snapshot_mode(args.snapshot)

    solutions = 0
    session.execute_text(goal)
    if session.state != AT_SUCCESS:
        for m in messages:
            if isinstance(m, P.Error):
                print("error: %s" % m.text, file=sys.stderr)
        _write_trace(args.trace, messages)
        return 1
    while session.state == AT_SUCCESS:
        solutions += 1
        print("solution %d: %s" % (solutions, _bindings(session)), file=out)
        if not args.all_solutions:
            break
        session.backtrack()

    _write_trace(args.trace, messages)
    first_success = next((i for i, m in enumerate(messages)
                          if isinstance(m, P.Success)), len(messages))
    undos_before = sum(1 for m in messages[:first_success]
                       if isinstance(m, P.UndoNode))
    print("solutions: %d" % solutions, file=out)
    print("call nodes: %d"
          % sum(1 for m in messages if isinstance(m, P.Node)), file=out)
    print("undo-node before first success: %d" % undos_before, file=out)
    return 0


def _write_trace(path, messages):
    if path is None:
        return
    try:
        with open(path, "wb") as f:
            for m in messages:
                f.write(P.encode(m).encode("utf-8"))
    except OSError as e:
        raise CliError("cannot write trace: %s" % e, status=2)


# --- serve ---

def cmd_serve(args, out=None):
    out = sys.stdout if out is None else out
    model = _load_model(args.model, args.n)
    factory = server_mod.session_factory(
        model, trace_failures=args.trace_failures)
    try:
        srv = server_mod.serve(
            factory, port=args.port,
            log=lambda line: print(line, file=out, flush=True))
    except OSError as e:
        print("cannot bind port %d: %s" % (args.port, e), file=sys.stderr)
        return 3
    print("raw protocol on port %d, websocket on port %d"
          % (srv.raw_port, srv.ws_port), file=out, flush=True)
    try:
        srv.wait()
    except KeyboardInterrupt:
        srv.stop()
    return 0


# --- export ---

def _read_trace(path):
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise CliError("cannot read trace: %s" % e, status=2)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CliError("trace is not UTF-8: %s" % e)
    return [line for line in text.split("\n") if line]


def _fold_trace(lines):
    validator = P.StreamValidator()
    tree = tree_mod.SearchTree()
    for lineno, line in enumerate(lines, start=1):
        try:
            msg = P.decode(line, from_engine=True)
            validator.feed(msg)
            tree.apply(msg)
        except (P.ProtocolError, tree_mod.StreamCorruptionError) as e:
            raise CliError("frame %d: %s" % (lineno, e))
    return tree


def cmd_export(args, out=None):
    out = sys.stdout if out is None else out
    tree = _fold_trace(_read_trace(args.trace))
    try:
        doc = tree_mod.export(tree, args.layout, args.format)
    except tree_mod.UnsupportedFormatError as e:
        raise CliError(str(e))
    if args.out is None:
        out.write(doc)
    else:
        try:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(doc)
        except OSError as e:
            raise CliError("cannot write export: %s" % e, status=2)
    return 0


# --- argument surface ---

def _add_model_args(sub):
    sub.add_argument("model_path", nargs="?", default=None,
                     help="model file (same as --model)")
    sub.add_argument("--model", default=None, help="model file path")
    sub.add_argument("--n", type=int, default=None,
                     help="override model parameter N")
    sub.add_argument("--snapshot", choices=SNAPSHOT_MODES, default=SIZE,
                     help="domain snapshot payload mode")
    sub.add_argument("--trace-failures", action="store_true",
                     help="also show value trials that fail immediately")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fdsteer",
        description="Finite-domain solving with a steerable search tree.")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="execute goals headless")
    _add_model_args(run)
    run.add_argument("--goals", required=True,
                     help="comma list of goals or button prefixes, "
                          "or all-buttons")
    run.add_argument("--all-solutions", action="store_true",
                     help="backtrack through every solution")
    run.add_argument("--trace", default=None,
                     help="write the frame stream to this file")

    srv = subs.add_parser("serve", help="serve sessions over sockets")
    _add_model_args(srv)
    srv.add_argument("--port", type=int,
                     default=int(os.environ.get("FDSTEER_PORT",
                                                DEFAULT_PORT)),
                     help="raw protocol port; websocket uses port+1")

    exp = subs.add_parser("export", help="render a trace file")
    exp.add_argument("trace_path", nargs="?", default=None,
                     help="trace file (same as --trace)")
    exp.add_argument("--trace", default=None, help="trace file path")
    exp.add_argument("--layout", choices=tree_mod.LAYOUTS,
                     default="fixed-width")
    exp.add_argument("--format", choices=("svg", "scene"), default="svg")
    exp.add_argument("--out", default=None,
                     help="output file (stdout when omitted)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("run", "serve"):
        if args.model is None:
            args.model = args.model_path
        elif args.model_path is not None:
            parser.error("model given both as flag and positional")
    if args.command == "export":
        if args.trace is None:
            args.trace = args.trace_path
        elif args.trace_path is not None:
            parser.error("trace given both as flag and positional")
        if args.trace is None:
            parser.error("export needs a trace file")
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "serve":
            return cmd_serve(args)
        return cmd_export(args)
    except CliError as e:
        print("error: %s" % e, file=sys.stderr)
        return e.status


if __name__ == "__main__":
    sys.exit(main())
