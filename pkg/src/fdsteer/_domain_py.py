"""Pure-Python domain kernel.

A domain is a tuple of (lo, hi) int pairs: closed intervals, sorted
ascending, pairwise disjoint and non-adjacent (for consecutive intervals
[a,b],[c,d] it holds that c > b+1). The empty tuple is the empty domain.
These functions are the propagation hot path; `fdsteer._domain_cy` holds the
compiled twin and `fdsteer.domains` picks one at import.

Inputs are assumed well-formed. Validation happens at the API boundary in
`fdsteer.domains`.
"""

__all__ = [
    "make", "size", "dmin", "dmax", "contains", "is_singleton",
    "remove_value", "narrow_bounds", "values",
]


def make(lo, hi):
    """Build the interval domain {lo..hi}. Caller guarantees lo <= hi."""
    return ((lo, hi),)


def size(d):
    """Number of values in the domain."""
    n = 0
    for lo, hi in d:
        n += hi - lo + 1
    return n


def dmin(d):
    """Smallest value. Caller guarantees the domain is nonempty."""
    return d[0][0]


def dmax(d):
    """Largest value. Caller guarantees the domain is nonempty."""
    return d[-1][1]


def contains(d, v):
    for lo, hi in d:
        if v < lo:
            return False
        if v <= hi:
            return True
    return False


def is_singleton(d):
    return len(d) == 1 and d[0][0] == d[0][1]


def remove_value(d, v):
    """Return d without v, renormalized. Empty tuple signals an empty domain.

    Args:
        d: a well-formed domain.
        v: the value to remove; absent values are a no-op.
    """
    out = []
    hit = False
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


def narrow_bounds(d, lo, hi):
    """Return d intersected with [lo, hi]. Empty tuple if disjoint."""
    out = []
    changed = False
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


def values(d):
    """All values ascending, as a tuple."""
    out = []
    for lo, hi in d:
        out.extend(range(lo, hi + 1))
    return tuple(out)
