"""Domain API: kernel selection plus validated constructors.

The kernel (interval arithmetic on tuples of (lo, hi) pairs) exists twice:
`_domain_cy` compiled with Cython and `_domain_py` in plain Python. The
compiled one is used when importable; set FDSTEER_PURE=1 to force the pure
kernel (benchmarks and tests exercise both explicitly).
"""
import os

if os.environ.get("FDSTEER_PURE"):
    from . import _domain_py as _impl
else:
    try:
        from . import _domain_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _domain_py as _impl  # type: ignore[no-redef]

KERNEL = _impl.__name__.rsplit(".", 1)[-1]

size = _impl.size
dmin = _impl.dmin
dmax = _impl.dmax
contains = _impl.contains
is_singleton = _impl.is_singleton
remove_value = _impl.remove_value
narrow_bounds = _impl.narrow_bounds
values = _impl.values

# Default global value range. Mirrors a classic bounded FD solver range;
# stores may be built with a different one. Arithmetic beyond the overflow
# limit is an error, never wraparound.
RANGE_MIN = 0
RANGE_MAX = 2 ** 28 - 1
OVERFLOW_LIMIT = 2 ** 62


class InvalidRangeError(ValueError):
    """lo > hi, or bounds outside the store's global range."""


class ArithmeticOverflowError(OverflowError):
    """A linear filter's partial sum left the representable range."""


def new_domain(lo: int, hi: int, range_min: int = RANGE_MIN,
               range_max: int = RANGE_MAX):
    """Validated constructor for the interval domain {lo..hi}.

    Args:
        lo, hi: inclusive bounds; lo must not exceed hi.
        range_min, range_max: the enclosing global range.

    Raises:
        InvalidRangeError: on lo > hi or bounds escaping the global range.
    """
    if lo > hi:
        raise InvalidRangeError("empty range %d..%d" % (lo, hi))
    if lo < range_min or hi > range_max:
        raise InvalidRangeError(
            "range %d..%d escapes the global range %d..%d"
            % (lo, hi, range_min, range_max))
    return _impl.make(lo, hi)
