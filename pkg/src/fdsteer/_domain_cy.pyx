# cython: language_level=3, boundscheck=False
"""Compiled domain kernel, mirroring fdsteer._domain_py exactly.

Same tuple-of-(lo, hi)-pairs representation; the win is C-level loops over
the interval sequence without interpreter dispatch per step.
"""

__all__ = [
    "make", "size", "dmin", "dmax", "contains", "is_singleton",
    "remove_value", "narrow_bounds", "values",
]


def make(long lo, long hi):
    """Build the interval domain {lo..hi}. Caller guarantees lo <= hi."""
    return ((lo, hi),)


def size(tuple d):
    """Number of values in the domain."""
    cdef long n = 0
    cdef long lo, hi
    for lo, hi in d:
        n += hi - lo + 1
    return n


def dmin(tuple d):
    """Smallest value. Caller guarantees the domain is nonempty."""
    return d[0][0]


def dmax(tuple d):
    """Largest value. Caller guarantees the domain is nonempty."""
    return d[-1][1]


def contains(tuple d, long v):
    cdef long lo, hi
    for lo, hi in d:
        if v < lo:
            return False
        if v <= hi:
            return True
    return False


def is_singleton(tuple d):
    if len(d) != 1:
        return False
    cdef long lo = d[0][0]
    cdef long hi = d[0][1]
    return lo == hi


def remove_value(tuple d, long v):
    """Return d without v, renormalized. Empty tuple signals an empty domain."""
    cdef list out = []
    cdef bint hit = False
    cdef long lo, hi
    for lo, hi in d:
        if hit or v < lo or v > hi:
            out.append((lo, hi))
            continue
        hit = True
        if lo <= v - 1:
            out.append((lo, v - 1))
        if v + 1 <= hi:
            out.append((v + 1, hi))
    if not hit:
        return d
    return tuple(out)


def narrow_bounds(tuple d, long lo, long hi):
    """Return d intersected with [lo, hi]. Empty tuple if disjoint."""
    cdef list out = []
    cdef bint changed = False
    cdef long a, b, na, nb
    for a, b in d:
        na = a if a >= lo else lo
        nb = b if b <= hi else hi
        if na > nb:
            changed = True
            continue
        if na != a or nb != b:
            changed = True
        out.append((na, nb))
    if not changed:
        return d
    return tuple(out)


def values(tuple d):
    """All values ascending, as a tuple."""
    cdef list out = []
    cdef long lo, hi, v
    for lo, hi in d:
        for v in range(lo, hi + 1):
            out.append(v)
    return tuple(out)
