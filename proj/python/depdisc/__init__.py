"""Dependency discovery (FDs, UCCs, ODs, DCs) over a metered multi-worker runtime.

Thin wrapper around the compiled extension: the heavy lifting stays in C++,
this layer turns JSON documents into dicts.
"""

import json

from depdisc._depdisc import (
    InputError,
    LimitError,
    Relation,
    discover_json,
    load_csv,
    oracle_json,
    precision_json,
)

__version__ = "0.1.0"

__all__ = [
    "InputError",
    "LimitError",
    "Relation",
    "load_csv",
    "discover",
    "oracle",
    "precision",
    "__version__",
]


def discover(relation, dep, algo, ldp=1, workers=1, memory_budget=0, seed=0,
             keep_trivial=False):
    """Run a discovery plan. Returns the result document as a dict with
    keys config, dependencies, counts, phase_trace, metrics."""
    return json.loads(discover_json(relation, dep, algo, ldp, workers,
                                    memory_budget, seed, keep_trivial))


def oracle(relation, dep, max_rows=500, max_cols=8, max_dc_predicates=3,
           keep_trivial=False):
    """Exhaustive reference discovery within the given size caps."""
    return json.loads(oracle_json(relation, dep, max_rows, max_cols,
                                  max_dc_predicates, keep_trivial))


def precision(relation, parts, seed=0):
    """Split-and-intersect FD precision experiment (parts >= 2)."""
    return json.loads(precision_json(relation, parts, seed))
