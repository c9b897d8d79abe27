"""Interactive goal execution over a model: run, pause at success, take
further goals, backtrack on request, and narrate everything as protocol
messages.

The trace discipline is the load-bearing part. Tree events form a stack:
every label step pushes a call node, every consistent value trial pushes a
success child, and all retraction happens in reverse creation order, so the
stream stays replayable and validator-clean. Failed value trials are silent
by default (a dead call node is just a leaf); `trace_failures` turns them
into explicit child/undo-child pairs.

Choice points and interaction frames both scope into the same three stacks
(trail, event stack, choice points) by remembered depths, which is what
makes frame-scoped backtracking and unconditional interaction pops cheap
and exact.
"""
from dataclasses import dataclass

from . import domains, protocol as P
from .constraints import LinearTerm, Relation, post_all_different, \
    post_linear, post_neq_offset, post_safe
from .domains import ArithmeticOverflowError
from .goals import AllDifferent, Conj, DomainDecl, FdLabeling, \
    GoalSyntaxError, Labeling, LinearRel, Minimize, NeqOffset, Safe, \
    parse_goal, render_goal
from .store import Propagator, Store, UnknownVariableError

IDLE = "Idle"
RUNNING = "Running"
AT_SUCCESS = "AtSuccess"
EXHAUSTED = "Exhausted"

SIZE = "size"
INTERVAL = "interval"
VALUES = "values"

_UNDO_SNAPSHOT = {
    SIZE: P.UndoDomainSizes,
    INTERVAL: P.UndoDomainIntervals,
    VALUES: P.UndoDomainValues,
}


class _Aborted(Exception):
    """Raised at a poll point when the GUI asked for a clear."""


class _CompileError(Exception):
    pass


class _CostBound(Propagator):
    """Sticky upper bound on the cost variable during branch and bound."""

    watched = ()

    def __init__(self, vid):
        self.vid = vid
        self.bound = None

    def run(self, store):
        if self.bound is None:
            return True
        d = store.dom(self.vid)
        if domains.dmax(d) <= self.bound:
            return True
        return store.set_domain(
            self.vid, domains.narrow_bounds(d, domains.dmin(d), self.bound))


@dataclass
class _CP:
    vid: int
    node_id: int
    mark: int
    depth: int            # event-stack length right after the node push
    remaining: list
    tasks: list
    task: int             # index to continue from after this step's child


@dataclass
class _Frame:
    goal_text: str
    mark: int
    estack_depth: int
    cp_depth: int
    snapcount: int
    sticky_len: int
    button_count: int


class Session:
    """One interactive solving session over a loaded model.

    sink receives every engine->GUI protocol message, in order. control, if
    given, is polled at label-step boundaries while the engine runs; it
    returns a pending GUI message or None.
    """

    def __init__(self, model, sink=None, control=None, trace_failures=False):
        self.model = model
        self.sink = sink
        self.control = control
        self.trace_failures = trace_failures
        self.state = IDLE
        self.mode = SIZE
        self.store = self._build_store()
        self._frames = []
        self._cps = []
        self._estack = []     # ("node"|"child", id), live entries only
        self._next_id = 1
        self._snapcount = 0
        self._button_count = len(model.buttons)

    # --- plumbing ---

    def _build_store(self):
        st = Store()
        for names, lo, hi in self.model.declarations:
            for n in names:
                st.new_var(lo, hi, n)
        return st

    def _emit(self, msg):
        if self.sink is not None:
            self.sink(msg)

    def _error(self, text):
        self._emit(P.Error(text))

    def start(self):
        """Announce the model: variables, buttons, and a first snapshot."""
        self._emit(P.Variables(tuple(d for _, d in self.model.varnames)))
        for i, text in enumerate(self.model.buttons, start=1):
            self._emit(P.Button(i, text))
        self._snapshot()
        return self.state

    def _snapshot(self):
        pairs = []
        for name, disp in self.model.varnames:
            d = self.store.dom(self.store.vid_of(name))
            if self.mode == SIZE:
                pairs.append((disp, domains.size(d)))
            elif self.mode == INTERVAL:
                pairs.append((disp, (domains.dmin(d), domains.dmax(d))))
            else:
                pairs.append((disp, domains.values(d)))
        if self.mode == SIZE:
            self._emit(P.DomainSizes(tuple(pairs)))
        elif self.mode == INTERVAL:
            self._emit(P.DomainIntervals(tuple(pairs)))
        else:
            self._emit(P.DomainValues(tuple(pairs)))
        self._snapcount += 1

    def set_snapshot_mode(self, mode):
        if mode not in (SIZE, INTERVAL, VALUES):
            raise ValueError(mode)
        self.mode = mode
        self._snapshot()

    def dispatch(self, msg):
        """Apply one GUI message at a wait point."""
        if isinstance(msg, P.ClearCmd):
            self.clear()
        elif isinstance(msg, P.ShowSize):
            self.set_snapshot_mode(SIZE)
        elif isinstance(msg, P.ShowInterval):
            self.set_snapshot_mode(INTERVAL)
        elif isinstance(msg, P.ShowValues):
            self.set_snapshot_mode(VALUES)
        elif isinstance(msg, P.Execute):
            self.execute_text(msg.goal)
        elif isinstance(msg, P.Backtrack):
            self.backtrack()
        elif isinstance(msg, P.BacktrackInteraction):
            self.backtrack_interaction()
        else:
            self._error("unexpected message %r" % (msg,))
        return self.state

    def _poll(self):
        if self.control is None:
            return
        while True:
            msg = self.control()
            if msg is None:
                return
            if isinstance(msg, P.ClearCmd):
                raise _Aborted
            if isinstance(msg, P.ShowSize):
                self.set_snapshot_mode(SIZE)
            elif isinstance(msg, P.ShowInterval):
                self.set_snapshot_mode(INTERVAL)
            elif isinstance(msg, P.ShowValues):
                self.set_snapshot_mode(VALUES)
            else:
                self._error("busy: command rejected while the engine runs")

    # --- tree events ---

    def _attach_point(self):
        for kind, nid in reversed(self._estack):
            if kind == "child":
                return nid
        return 0

    def _push(self, kind, parent, label):
        nid = self._next_id
        self._next_id += 1
        self._estack.append((kind, nid))
        if kind == "node":
            self._emit(P.Node(nid, parent, label))
        else:
            self._emit(P.Child(nid, parent, label))
        return nid

    def _unwind_to(self, depth):
        while len(self._estack) > depth:
            kind, nid = self._estack.pop()
            self._emit(P.UndoNode(nid) if kind == "node"
                       else P.UndoChild(nid))

    def _bindings_label(self):
        parts = []
        for name, disp in self.model.varnames:
            d = self.store.dom(self.store.vid_of(name))
            if domains.is_singleton(d):
                parts.append("%s=%d" % (disp, domains.dmin(d)))
            else:
                parts.append("%s=%d..%d" % (disp, domains.dmin(d),
                                            domains.dmax(d)))
        return " ".join(parts)

    # --- goal compilation ---

    def _vid(self, name):
        try:
            return self.store.vid_of(name)
        except UnknownVariableError:
            raise _CompileError("unknown variable %s" % name) from None

    def _disp(self, name):
        return self.model.display_of(name)

    def _lterm(self, e):
        return LinearTerm.make([(c, self._vid(n)) for c, n in e.terms],
                               e.const)

    def _compile(self, ast, out=None):
        if out is None:
            out = []
        if isinstance(ast, Conj):
            for g in ast.goals:
                self._compile(g, out)
        elif isinstance(ast, Labeling):
            for v in ast.vars:
                out.append(("label", self._vid(v),
                            "label(%s)" % self._disp(v)))
        elif isinstance(ast, FdLabeling):
            out.append(("label", self._vid(ast.var),
                        "fd_labeling(%s)" % self._disp(ast.var)))
        elif isinstance(ast, Minimize):
            sub = self._compile(ast.goal, [])
            if all(t[0] == "post" for t in sub):
                raise _CompileError(
                    "unbounded search: minimize goal has no labeling")
            out.append(("minimize", self._vid(ast.cost), sub))
        elif isinstance(ast, LinearRel):
            out.append(("post", ("lin", self._lterm(ast.lhs), ast.rel,
                                 self._lterm(ast.rhs))))
        elif isinstance(ast, AllDifferent):
            out.append(("post", ("alldiff",
                                 tuple(self._vid(v) for v in ast.vars))))
        elif isinstance(ast, DomainDecl):
            out.append(("post", ("dom", tuple(self._vid(v)
                                              for v in ast.vars),
                                 ast.lo, ast.hi)))
        elif isinstance(ast, Safe):
            out.append(("post", ("safe",
                                 tuple(self._vid(v) for v in ast.vars))))
        elif isinstance(ast, NeqOffset):
            out.append(("post", ("neq", self._vid(ast.x), self._vid(ast.y),
                                 ast.c)))
        else:
            raise _CompileError("cannot execute %r" % (ast,))
        return out

    def _apply_post(self, spec):
        kind = spec[0]
        if kind == "lin":
            _, lhs, rel, rhs = spec
            post_linear(self.store, lhs, rel, rhs)
        elif kind == "alldiff":
            post_all_different(self.store, spec[1])
        elif kind == "dom":
            _, vids, lo, hi = spec
            for vid in vids:
                nd = domains.narrow_bounds(self.store.dom(vid), lo, hi)
                if not self.store.set_domain(vid, nd):
                    return False
        elif kind == "safe":
            post_safe(self.store, spec[1])
        elif kind == "neq":
            post_neq_offset(self.store, spec[1], spec[2], spec[3])
        return self.store.propagate()

    # --- the search drivers ---

    def _try_values(self, cp):
        while cp.remaining:
            v = cp.remaining.pop(0)
            if self.store.assign(cp.vid, v):
                self._push("child", cp.node_id, self._bindings_label())
                return True
            if self.trace_failures:
                disp = self.model.display_of(self.store.name_of(cp.vid)
                                             or "_%d" % cp.vid)
                self._push("child", cp.node_id, "%s=%d" % (disp, v))
                self._unwind_to(len(self._estack) - 1)
            self.store.undo_to(cp.mark)
        return False

    def _run_tasks(self, tasks, i):
        """Run tasks[i:]. None on failure; on success, True when the last
        completed task was a finished minimize (its announcement already
        happened, so the caller must not emit another success)."""
        last_minimize = False
        while i < len(tasks):
            t = tasks[i]
            if t[0] == "post":
                if not self._apply_post(t[1]):
                    return None
                last_minimize = False
            elif t[0] == "label":
                self._poll()
                _, vid, text = t
                nid = self._push("node", self._attach_point(), text)
                cp = _CP(vid=vid, node_id=nid, mark=self.store.mark(),
                         depth=len(self._estack),
                         remaining=list(domains.values(self.store.dom(vid))),
                         tasks=tasks, task=i + 1)
                if not self._try_values(cp):
                    self._unwind_to(cp.depth - 1)
                    return None
                self._cps.append(cp)
                last_minimize = False
            else:  # minimize
                if not self._run_minimize(t[1], t[2]):
                    return None
                last_minimize = True
            i += 1
        return last_minimize

    def _resume(self, cp_floor):
        """Backtrack among choice points above cp_floor. Returns (ok,
        suppressed); exhausting down to the floor yields (False, False) with
        the event stack swept accordingly."""
        while len(self._cps) > cp_floor:
            cp = self._cps[-1]
            self._unwind_to(cp.depth)
            self.store.undo_to(cp.mark)
            if self._try_values(cp):
                res = self._run_tasks(cp.tasks, cp.task)
                if res is not None:
                    return True, res
                continue
            self._cps.pop()
            self._unwind_to(cp.depth - 1)
        return False, False

    def _run_minimize(self, cost_vid, subtasks):
        bound = _CostBound(cost_vid)
        self.store.sticky.append(bound)
        cp_floor = len(self._cps)
        best = None
        try:
            found = self._run_tasks(subtasks, 0) is not None
            while found:
                best = domains.dmin(self.store.dom(cost_vid))
                self._emit(P.Success())
                self._snapshot()
                bound.bound = best - 1
                found, _ = self._resume(cp_floor)
        finally:
            self.store.sticky.remove(bound)
        if best is None:
            return False
        # Optimum known; re-descend deterministically to restore its
        # bindings. The trip is silent at the success level and leaves no
        # resumable choice points behind.
        post_linear(self.store, LinearTerm(((1, cost_vid),)), Relation.EQ,
                    LinearTerm((), best))
        if not self.store.propagate():
            return False
        res = self._run_tasks(subtasks, 0)
        if res is None:
            ok, _ = self._resume(cp_floor)
            if not ok:
                return False
        del self._cps[cp_floor:]
        return True

    # --- frame management ---

    def _pop_frame(self, undo_goal):
        f = self._frames.pop()
        self._unwind_to(f.estack_depth)
        del self._cps[f.cp_depth:]
        self.store.undo_to(f.mark)
        del self.store.sticky[f.sticky_len:]
        for bid in range(self._button_count, f.button_count, -1):
            self._emit(P.UndoButton(bid))
        self._button_count = f.button_count
        if undo_goal:
            self._emit(P.UndoGoal(f.goal_text))
        if self._snapcount > f.snapcount:
            self._emit(_UNDO_SNAPSHOT[self.mode](f.snapcount))
            self._snapcount = f.snapcount

    def _settle(self):
        self.state = AT_SUCCESS if self._frames else IDLE
        return self.state

    # --- public operations ---

    def execute_text(self, text):
        try:
            ast = parse_goal(text)
        except GoalSyntaxError as exc:
            self._error("parse error: %s" % exc)
            return self.state
        return self.execute(ast, text=text)

    def execute(self, ast, text=None):
        if self.state not in (IDLE, AT_SUCCESS):
            self._error("execute rejected in state %s" % self.state)
            return self.state
        if text is None:
            text = render_goal(ast)
        try:
            tasks = self._compile(ast)
        except _CompileError as exc:
            self._error(str(exc))
            return self.state
        f = _Frame(goal_text=text, mark=self.store.mark(),
                   estack_depth=len(self._estack),
                   cp_depth=len(self._cps), snapcount=self._snapcount,
                   sticky_len=len(self.store.sticky),
                   button_count=self._button_count)
        self._frames.append(f)
        self.state = RUNNING
        try:
            res = self._run_tasks(tasks, 0)
            if res is not None:
                ok, suppressed = True, res
            else:
                ok, suppressed = self._resume(f.cp_depth)
        except _Aborted:
            return self._do_clear()
        except ArithmeticOverflowError:
            self._pop_frame(undo_goal=False)
            self._error("arithmetic overflow while executing %s" % text)
            return self._settle()
        if ok:
            if not suppressed:
                self._emit(P.Success())
            self._snapshot()
            self.state = AT_SUCCESS
        else:
            self._pop_frame(undo_goal=False)
            self._settle()
            self._error("goal failed: %s" % text)
        return self.state

    def backtrack(self):
        if self.state != AT_SUCCESS:
            self._error("backtrack rejected in state %s" % self.state)
            return self.state
        f = self._frames[-1]
        self.state = RUNNING
        try:
            ok, suppressed = self._resume(f.cp_depth)
        except _Aborted:
            return self._do_clear()
        except ArithmeticOverflowError:
            self._pop_frame(undo_goal=True)
            self._error("arithmetic overflow while backtracking")
            return self._settle()
        if ok:
            if not suppressed:
                self._emit(P.Success())
            self._snapshot()
            self.state = AT_SUCCESS
            return self.state
        self._pop_frame(undo_goal=True)
        return self._settle()

    def backtrack_interaction(self):
        if self.state == RUNNING:
            self._error("backtrackInteraction rejected while running")
            return self.state
        if not self._frames:
            self._error("backtrackInteraction rejected: no interaction")
            return self.state
        self._pop_frame(undo_goal=True)
        return self._settle()

    def clear(self):
        return self._do_clear()

    def _do_clear(self):
        self.store = self._build_store()
        self._frames = []
        self._cps = []
        self._estack = []
        self._next_id = 1
        self._snapcount = 0
        self.state = IDLE
        self._emit(P.Clear())
        self._snapshot()
        return self.state
