"""Fixture data and brute-force oracles shared by the test modules."""

from __future__ import annotations

import itertools
import json
import math
from pathlib import Path

import numpy as np

from polarlouvain.graph import WeightedGraph, largest_component
from polarlouvain.polarization import MembershipProfile

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src" / "polarlouvain" / "schemas"

# Seven-node worked case: adjacency, pole memberships and the printed
# dialogue matrix (entries to be divided by the printed normalizer).
SEVEN_ADJ = np.array([
    [0, 1, 1, 0, 1, 0, 1],
    [1, 0, 1, 0, 0, 0, 0],
    [1, 1, 0, 1, 1, 0, 1],
    [0, 0, 1, 0, 1, 0, 0],
    [1, 0, 1, 1, 0, 1, 1],
    [0, 0, 0, 0, 1, 0, 1],
    [1, 0, 1, 0, 1, 1, 0],
], dtype=float)
SEVEN_ETA_A = (0.022, 0.756, 0.751, 0.5, 0.001, 0.102, 0.889)
SEVEN_ETA_B = (0.878, 0.144, 0.099, 0.5, 0.989, 0.888, 0.112)
SEVEN_PRINTED_TOTAL = 22.574
SEVEN_PRINTED = np.array([
    [0.000, 0.336, 0.341, 0.561, 0.978, 0.910, 0.219],
    [0.336, 0.000, 0.892, 0.622, 0.252, 0.329, 0.872],
    [0.341, 0.892, 0.000, 0.625, 0.257, 0.333, 0.912],
    [0.561, 0.622, 0.625, 0.000, 0.506, 0.556, 0.556],
    [0.978, 0.252, 0.257, 0.506, 0.000, 0.899, 0.121],
    [0.910, 0.329, 0.333, 0.556, 0.899, 0.000, 0.211],
    [0.219, 0.872, 0.912, 0.556, 0.121, 0.211, 0.000],
])

# Four crisp nodes alternating between the poles.
FOUR_ETA_A = (1.0, 0.0, 1.0, 0.0)
FOUR_ETA_B = (0.0, 1.0, 0.0, 1.0)
# Subset (1-based) -> risk measure value, and -> dialogue measure value.
FOUR_RISK_TABLE = {
    (1, 2): 0.25, (1, 3): 0.0, (1, 4): 0.25, (2, 3): 0.25, (2, 4): 0.0, (3, 4): 0.25,
    (1, 2, 3): 0.5, (1, 2, 4): 0.5, (1, 3, 4): 0.5, (2, 3, 4): 0.5, (1, 2, 3, 4): 1.0,
}
FOUR_DIALOGUE_TABLE = {
    (1, 2): 0.0, (1, 3): 0.5, (1, 4): 0.0, (2, 3): 0.0, (2, 4): 0.5, (3, 4): 0.0,
    (1, 2, 3): 0.5, (1, 2, 4): 0.5, (1, 3, 4): 0.5, (2, 3, 4): 0.5, (1, 2, 3, 4): 1.0,
}

# Eight crisp nodes (two wheels) and the 0/1 patterns of their matrices.
EIGHT_ETA_A = (1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0)
EIGHT_ETA_B = tuple(1.0 - x for x in EIGHT_ETA_A)
EIGHT_RISK_PATTERN = np.array([
    [0, 1, 1, 0, 0, 0, 1, 1],
    [1, 0, 0, 1, 1, 1, 0, 0],
    [1, 0, 0, 1, 1, 1, 0, 0],
    [0, 1, 1, 0, 0, 0, 1, 1],
    [0, 1, 1, 0, 0, 0, 1, 1],
    [0, 1, 1, 0, 0, 0, 1, 1],
    [1, 0, 0, 1, 1, 1, 0, 0],
    [1, 0, 0, 1, 1, 1, 0, 0],
], dtype=float)
EIGHT_DIALOGUE_PATTERN = np.array([
    [0, 0, 0, 1, 1, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 1],
    [0, 1, 0, 0, 0, 0, 1, 1],
    [1, 0, 0, 0, 1, 1, 0, 0],
    [1, 0, 0, 1, 0, 1, 0, 0],
    [1, 0, 0, 1, 1, 0, 0, 0],
    [0, 1, 1, 0, 0, 0, 0, 1],
    [0, 1, 1, 0, 0, 0, 1, 0],
], dtype=float)
TWO_WHEEL_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5), (4, 5)]


def seven_graph() -> WeightedGraph:
    return WeightedGraph(tuple(str(i) for i in range(1, 8)), SEVEN_ADJ)


def seven_profile() -> MembershipProfile:
    return MembershipProfile(np.array(SEVEN_ETA_A), np.array(SEVEN_ETA_B), tuple(str(i) for i in range(1, 8)))


def four_profile() -> MembershipProfile:
    return MembershipProfile(np.array(FOUR_ETA_A), np.array(FOUR_ETA_B))


def eight_profile() -> MembershipProfile:
    return MembershipProfile(np.array(EIGHT_ETA_A), np.array(EIGHT_ETA_B))


def two_wheel_graph() -> WeightedGraph:
    return WeightedGraph.from_edges(TWO_WHEEL_EDGES, node_ids=range(1, 9))


def set_partitions(n: int):
    """Every partition of range(n) as a restricted-growth label tuple."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for c in range(top + 2):
            yield from grow(prefix + [c], max(top, c))
    if n == 0:
        return
    yield from grow([0], 0)


def exhaustive_max_modularity(w: np.ndarray) -> tuple[float, tuple]:
    from polarlouvain.community import modularity

    best, arg = -math.inf, None
    for labels in set_partitions(w.shape[0]):
        q = modularity(w, labels)
        if q > best:
            best, arg = q, labels
    return best, arg


def scratch_modularity(w: np.ndarray, labels) -> float:
    """Textbook modularity straight from its double sum, used as an oracle."""
    w = np.asarray(w, dtype=float)
    two_m = w.sum()
    k = w.sum(axis=1)
    total = 0.0
    n = w.shape[0]
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                total += w[i, j] - k[i] * k[j] / two_m
    return total / two_m


def random_graph(rng: np.random.Generator, n: int, p: float, weighted: bool = False) -> WeightedGraph:
    """Largest component of a G(n, p) draw, optionally with uniform weights."""
    mask = np.triu(rng.random((n, n)) < p, 1)
    a = mask * (rng.uniform(0.5, 3.0, (n, n)) if weighted else 1.0)
    a = a + a.T
    return largest_component(WeightedGraph(tuple(range(n)), a))


def random_profile(rng: np.random.Generator, n: int) -> MembershipProfile:
    return MembershipProfile(rng.random(n), rng.random(n))


def all_subsets(n: int):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)


def load_schema(name: str) -> dict:
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())
