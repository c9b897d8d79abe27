"""fdsteer: a finite-domain constraint workbench with a steerable search.

The solver core (domains, store, constraints) runs a classic propagate and
backtrack loop. A session wraps it in an interactive execution model that
emits search-tree and domain events over a small line protocol, so the
search can be watched and steered from outside the process.
"""

__version__ = "0.1.0"
