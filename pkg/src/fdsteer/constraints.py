"""Concrete constraint library: linear relations, offset disequality,
all_different, and the no-attack helper used by the queens examples.

Filtering levels are deliberately classical and are pinned by the tests:

  - linear EQ and order relations narrow bounds only, by interval reasoning
    with integer rounding, iterated to a local fixpoint inside one run;
  - linear NEQ filters only once all but one variable are singletons;
  - offset disequality (x != y + c) removes a value at singleton triggers;
  - all_different is the pairwise decomposition, so pigeonhole situations
    pass through unfiltered by design.

Stronger filtering would change the search trees the rest of the package is
built to reproduce.
"""
import enum
from dataclasses import dataclass

from . import domains
from .domains import ArithmeticOverflowError
from .store import Propagator, Store


class Relation(enum.Enum):
    EQ = "#="
    NEQ = "#\\="
    LT = "#<"
    LE = "#=<"
    GT = "#>"
    GE = "#>="


@dataclass(frozen=True)
class LinearTerm:
    """Canonical sum of integer-coefficient variables plus a constant.

    Coefficients are (coef, vid) pairs sorted by vid, merged, zero-free.
    """
    coeffs: tuple
    const: int = 0

    @classmethod
    def make(cls, pairs, const=0):
        acc: dict[int, int] = {}
        for coef, vid in pairs:
            acc[vid] = acc.get(vid, 0) + coef
        coeffs = tuple((c, v) for v, c in sorted(acc.items()) if c != 0)
        return cls(coeffs, const)

    def minus(self, other: "LinearTerm") -> "LinearTerm":
        return LinearTerm.make(
            list(self.coeffs) + [(-c, v) for c, v in other.coeffs],
            self.const - other.const)

    def negated(self) -> "LinearTerm":
        return LinearTerm(tuple((-c, v) for c, v in self.coeffs), -self.const)


def _ceil_div(p, q):
    return -((-p) // q)


def _check(total):
    if total > domains.OVERFLOW_LIMIT or total < -domains.OVERFLOW_LIMIT:
        raise ArithmeticOverflowError("partial sum %d out of range" % total)
    return total


class LinearProp(Propagator):
    """Bounds filter for sum(a_i * x_i) + c REL 0 with REL in {=, <=}."""

    def __init__(self, term: LinearTerm, equality: bool):
        self.term = term
        self.equality = equality
        self.watched = tuple(v for _, v in term.coeffs)

    def run(self, store: Store) -> bool:
        coeffs = self.term.coeffs
        const = self.term.const
        if not coeffs:
            return const == 0 if self.equality else const <= 0
        changed = True
        while changed:
            changed = False
            for k, (a, xk) in enumerate(coeffs):
                rest_min = const
                rest_max = const
                for j, (b, xj) in enumerate(coeffs):
                    if j == k:
                        continue
                    dj = store.dom(xj)
                    lo, hi = domains.dmin(dj), domains.dmax(dj)
                    if b > 0:
                        rest_min = _check(rest_min + b * lo)
                        rest_max = _check(rest_max + b * hi)
                    else:
                        rest_min = _check(rest_min + b * hi)
                        rest_max = _check(rest_max + b * lo)
                dk = store.dom(xk)
                lo, hi = domains.dmin(dk), domains.dmax(dk)
                if self.equality:
                    # a*xk must meet [-rest_max, -rest_min]
                    if a > 0:
                        nlo = _ceil_div(-rest_max, a)
                        nhi = -rest_min // a
                    else:
                        nlo = _ceil_div(-rest_min, a)
                        nhi = -rest_max // a
                else:
                    # a*xk <= -rest_min
                    if a > 0:
                        nlo, nhi = lo, -rest_min // a
                    else:
                        nlo, nhi = _ceil_div(-rest_min, a), hi
                if nlo > lo or nhi < hi:
                    nd = domains.narrow_bounds(dk, max(nlo, lo), min(nhi, hi))
                    if not store.set_domain(xk, nd):
                        return False
                    changed = True
        return True


class LinearNeqProp(Propagator):
    """sum(a_i * x_i) + c != 0, filtering only at the all-but-one-singleton
    frontier."""

    def __init__(self, term: LinearTerm):
        self.term = term
        self.watched = tuple(v for _, v in term.coeffs)

    def run(self, store: Store) -> bool:
        total = self.term.const
        free_coef = free_vid = None
        for a, vid in self.term.coeffs:
            d = store.dom(vid)
            if domains.is_singleton(d):
                total = _check(total + a * domains.dmin(d))
            elif free_vid is None:
                free_coef, free_vid = a, vid
            else:
                return True  # two or more free variables: no filtering
        if free_vid is None:
            return total != 0
        if total % free_coef:
            return True
        forbidden = -total // free_coef
        d = store.dom(free_vid)
        if not domains.contains(d, forbidden):
            return True
        return store.set_domain(free_vid, domains.remove_value(d, forbidden))


class NeqOffsetProp(Propagator):
    """x != y + c with value removal at singleton triggers."""

    def __init__(self, x: int, y: int, c: int):
        self.x, self.y, self.c = x, y, c
        self.watched = (x, y) if x != y else (x,)

    def run(self, store: Store) -> bool:
        if self.x == self.y:
            return self.c != 0
        dx, dy = store.dom(self.x), store.dom(self.y)
        if domains.is_singleton(dx):
            v = domains.dmin(dx) - self.c
            if domains.contains(dy, v):
                if not store.set_domain(self.y, domains.remove_value(dy, v)):
                    return False
                dy = store.dom(self.y)
        if domains.is_singleton(dy):
            w = domains.dmin(dy) + self.c
            if domains.contains(dx, w):
                return store.set_domain(self.x, domains.remove_value(dx, w))
        return True


def post_linear(store: Store, lhs: LinearTerm, rel: Relation,
                rhs: LinearTerm) -> int:
    """Install a filter for lhs REL rhs, folding rhs into lhs.

    Order relations normalize onto <=; strict ones shift the constant by one.

    Returns:
        The propagator id.
    """
    diff = lhs.minus(rhs)  # diff REL 0
    if rel is Relation.EQ:
        prop = LinearProp(diff, equality=True)
    elif rel is Relation.NEQ:
        prop = LinearNeqProp(diff)
    elif rel is Relation.LE:
        prop = LinearProp(diff, equality=False)
    elif rel is Relation.LT:
        prop = LinearProp(LinearTerm(diff.coeffs, diff.const + 1), equality=False)
    elif rel is Relation.GE:
        prop = LinearProp(diff.negated(), equality=False)
    elif rel is Relation.GT:
        neg = diff.negated()
        prop = LinearProp(LinearTerm(neg.coeffs, neg.const + 1), equality=False)
    else:  # pragma: no cover
        raise ValueError(rel)
    return store.post(prop)


def post_neq_offset(store: Store, x: int, y: int, c: int) -> int:
    return store.post(NeqOffsetProp(x, y, c))


def post_all_different(store: Store, vids) -> list:
    """Pairwise decomposition; returns the propagator ids."""
    pids = []
    vids = list(vids)
    for i in range(len(vids)):
        for j in range(i + 1, len(vids)):
            pids.append(post_neq_offset(store, vids[i], vids[j], 0))
    return pids


def post_safe(store: Store, vids) -> list:
    """No-attack constraints for queens on one row each:
    x_i != x_j and x_i != x_j +- (j - i) for i < j."""
    pids = []
    vids = list(vids)
    for i in range(len(vids)):
        for j in range(i + 1, len(vids)):
            k = j - i
            pids.append(post_neq_offset(store, vids[i], vids[j], 0))
            pids.append(post_neq_offset(store, vids[i], vids[j], k))
            pids.append(post_neq_offset(store, vids[i], vids[j], -k))
    return pids
