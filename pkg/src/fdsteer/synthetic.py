"""Deterministic scale workload for timing and layout checks.

The bundled bnbscale model is tuned so one minimize interaction emits
exactly CALL_NODES `<node>` frames: first descent, 57 strictly improving
successes, the optimality proof, and the closing re-descent to the
optimum. run() executes it against a local sink and reports the census.
"""
import time
from importlib import resources

from . import protocol as P
from .goals import parse_model
from .session import Session

CALL_NODES = 3905
SUCCESSES = 57
BEST_COST = 2


def model():
    text = (resources.files("fdsteer") / "models"
            / "bnbscale.model").read_text()
    return parse_model(text)


def run(sink=None, snapshot_mode="size"):
    """Execute the workload; every emitted message also goes to sink.
    Returns a stats dict with the call-node census and wall time."""
    out = []

    def tee(msg):
        out.append(msg)
        if sink is not None:
            sink(msg)

    s = Session(model(), sink=tee)
    s.start()
    if snapshot_mode != "size":
        s.set_snapshot_mode(snapshot_mode)
    constraints, search = s.model.buttons
    t0 = time.perf_counter()
    s.execute_text(constraints)
    s.execute_text(search)
    elapsed = time.perf_counter() - t0
    return {
        "call_nodes": sum(isinstance(m, P.Node) for m in out),
        "successes": sum(isinstance(m, P.Success) for m in out),
        "messages": len(out),
        "seconds": elapsed,
        "state": s.state,
    }
