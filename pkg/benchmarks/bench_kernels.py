"""Compare the compiled and pure-Python domain kernels.

Two levels: microbenchmarks call kernel functions directly on both
implementations; the end-to-end level runs the full 8-queens enumeration
in a subprocess per kernel, since the kernel is chosen at import time.

Usage: python3 benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import timeit

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fdsteer import _domain_py  # noqa: E402

try:
    from fdsteer import _domain_cy
except ImportError:
    _domain_cy = None

REPEAT = 5
NUMBER = 20000

WIDE = tuple((v, v) for v in range(0, 60, 2))


def _workloads(k):
    ragged = k.make(0, 1000)
    for v in range(3, 900, 7):
        ragged = k.remove_value(ragged, v)
    return {
        "remove_value mid": lambda: k.remove_value(WIDE, 30),
        "narrow_bounds": lambda: k.narrow_bounds(ragged, 100, 800),
        "contains sweep": lambda: [k.contains(ragged, v)
                                   for v in range(0, 1000, 50)],
        "size": lambda: k.size(ragged),
        "values wide": lambda: k.values(WIDE),
    }


def micro():
    kernels = [("pure", _domain_py)]
    if _domain_cy is not None:
        kernels.append(("compiled", _domain_cy))
    names = list(_workloads(_domain_py))
    print("%-18s" % "operation", end="")
    for kname, _ in kernels:
        print("%12s" % (kname + " us"), end="")
    if len(kernels) == 2:
        print("%10s" % "speedup", end="")
    print()
    for op in names:
        print("%-18s" % op, end="")
        per_call = []
        for _, kernel in kernels:
            fn = _workloads(kernel)[op]
            best = min(timeit.repeat(fn, number=NUMBER, repeat=REPEAT))
            per_call.append(best / NUMBER * 1e6)
            print("%12.3f" % per_call[-1], end="")
        if len(per_call) == 2:
            print("%9.2fx" % (per_call[0] / per_call[1]), end="")
        print()


QUEENS_SNIPPET = r"""
import time
from importlib import resources
from fdsteer import domains
from fdsteer.goals import parse_model
from fdsteer.session import AT_SUCCESS, Session

model = parse_model(
    (resources.files("fdsteer") / "models" / "queens.model").read_text())
n = 0
def count(m):
    global n
    n += 1
session = Session(model, sink=count)
session.start()
t0 = time.perf_counter()
session.execute_text("%s, %s" % (model.buttons[0], model.buttons[-1]))
while session.state == AT_SUCCESS:
    session.backtrack()
print("%s %.4f %d" % (domains.KERNEL, time.perf_counter() - t0, n))
"""


def end_to_end():
    print()
    print("8-queens full enumeration, one subprocess per kernel")
    for label, extra_env in (("compiled", {}), ("pure", {"FDSTEER_PURE": "1"})):
        env = dict(os.environ, **extra_env)
        env["PYTHONPATH"] = os.pathsep.join(
            [os.path.join(os.path.dirname(__file__), "..", "src"),
             env.get("PYTHONPATH", "")])
        best = None
        for _ in range(3):
            out = subprocess.run(
                [sys.executable, "-c", QUEENS_SNIPPET],
                env=env, capture_output=True, text=True, check=True).stdout
            kernel, seconds, frames = out.split()
            seconds = float(seconds)
            best = seconds if best is None else min(best, seconds)
        print("  %-9s (%s): %.3f s, %s frames"
              % (label, kernel, best, frames))


if __name__ == "__main__":
    micro()
    end_to_end()
