"""Constraint store: variables, trail, and the propagation fixpoint loop.

One store is one solver state. Everything that changes during search, the
variable domains and the set of installed propagators, is written through
the trail so that `undo_to` restores a marked state bit-exactly. A single
FIFO agenda schedules propagators; a propagator is re-enqueued whenever one
of its watched variables narrows. No event granularity beyond that.

A store is confined to one logical execution context. Distinct stores are
independent.
"""
from collections import deque

from . import domains
from .domains import ArithmeticOverflowError  # re-export for callers  # noqa: F401


class InvalidMarkError(ValueError):
    """Trail mark is stale: the store was already undone past it."""


class UnknownVariableError(KeyError):
    """Name does not resolve against this store's variable table."""

    def __str__(self):
        return self.args[0] if self.args else ""


class Propagator:
    """Filtering rule over a fixed set of watched variables.

    Subclasses implement `run(store)` returning False exactly when a domain
    was emptied. Filtering must be contracting (never adds values) and
    monotone in its inputs.
    """

    watched: tuple = ()

    def run(self, store) -> bool:
        raise NotImplementedError


class Store:
    def __init__(self, range_min: int = domains.RANGE_MIN,
                 range_max: int = domains.RANGE_MAX):
        self.range_min = range_min
        self.range_max = range_max
        self._doms: list = []
        self._names: dict[str, int] = {}      # insertion order = registration order
        self._name_of: list = []
        self._watchers: list[list[int]] = []
        self._props: list = []
        self._trail: list = []                # ("d", vid, old) | ("p",)
        self._agenda: deque = deque()
        self._queued: set[int] = set()
        # Sticky propagators are seeded into every propagate() run. They are
        # not trailed; the session manages their lifetime (see minimize).
        self.sticky: list = []

    # ---- variables ----

    def new_var(self, lo: int, hi: int, name: str | None = None) -> int:
        """Create a variable with domain {lo..hi}; optionally register a name.

        Args:
            lo, hi: inclusive initial bounds, inside the global range.
            name: external name, unique per store when given.

        Returns:
            The variable id, dense and stable for the store's lifetime.
        """
        if name is not None and name in self._names:
            raise ValueError("variable name %r already registered" % name)
        d = domains.new_domain(lo, hi, self.range_min, self.range_max)
        vid = len(self._doms)
        self._doms.append(d)
        self._watchers.append([])
        self._name_of.append(name)
        if name is not None:
            self._names[name] = vid
        return vid

    def vid_of(self, name: str) -> int:
        try:
            return self._names[name]
        except KeyError:
            raise UnknownVariableError("unknown variable %s" % name) from None

    def name_of(self, vid: int):
        return self._name_of[vid]

    def named_vars(self) -> list:
        """(name, vid) pairs in registration order."""
        return list(self._names.items())

    def dom(self, vid: int):
        return self._doms[vid]

    def num_vars(self) -> int:
        return len(self._doms)

    # ---- trail ----

    def mark(self) -> int:
        return len(self._trail)

    def undo_to(self, m: int) -> None:
        """Restore domains and the propagator set to their state at mark m."""
        if m > len(self._trail) or m < 0:
            raise InvalidMarkError("mark %d is stale (trail length %d)"
                                   % (m, len(self._trail)))
        trail = self._trail
        while len(trail) > m:
            entry = trail.pop()
            if entry[0] == "d":
                self._doms[entry[1]] = entry[2]
            else:
                prop = self._props.pop()
                for vid in prop.watched:
                    self._watchers[vid].pop()
        self._agenda.clear()
        self._queued.clear()

    # ---- propagation ----

    def set_domain(self, vid: int, nd) -> bool:
        """Install a narrowed domain, trailing the old one.

        Watchers of vid are enqueued. Returns False (and trails nothing) when
        nd is empty; the caller is expected to undo to a mark.
        """
        old = self._doms[vid]
        if nd == old:
            return True
        if not nd:
            return False
        self._trail.append(("d", vid, old))
        self._doms[vid] = nd
        for pid in self._watchers[vid]:
            if pid not in self._queued:
                self._queued.add(pid)
                self._agenda.append(pid)
        return True

    def post(self, prop: Propagator) -> int:
        """Install a propagator (trailed) and schedule its first run."""
        pid = len(self._props)
        self._props.append(prop)
        for vid in prop.watched:
            self._watchers[vid].append(pid)
        self._trail.append(("p",))
        if pid not in self._queued:
            self._queued.add(pid)
            self._agenda.append(pid)
        return pid

    def propagate(self) -> bool:
        """Run scheduled propagators to a fixpoint.

        Sticky propagators are seeded first on every call. Returns False iff
        some domain became empty; domains are then in an intermediate state
        and the caller must undo to a mark.
        """
        for prop in self.sticky:
            if not prop.run(self):
                self._agenda.clear()
                self._queued.clear()
                return False
        agenda, queued, props = self._agenda, self._queued, self._props
        while agenda:
            pid = agenda.popleft()
            queued.discard(pid)
            if pid >= len(props):
                continue  # undone while queued
            if not props[pid].run(self):
                agenda.clear()
                queued.clear()
                return False
        return True

    def narrow(self, vid: int, lo: int, hi: int) -> bool:
        """Narrow vid to its intersection with [lo, hi], then propagate."""
        if not self.set_domain(vid, domains.narrow_bounds(self._doms[vid], lo, hi)):
            return False
        return self.propagate()

    def assign(self, vid: int, v: int) -> bool:
        return self.narrow(vid, v, v)
