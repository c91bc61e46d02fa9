"""Shapley values of fuzzy measures and the associated weighted graph.

Two independent routes are provided: a permutation brute force that works
for any set function on at most ``MAX_BRUTE_FORCE`` players, and the
row-sum closed form that holds for 2-additive measures built from a
symmetric pair matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable

import numpy as np

from .errors import ContractViolation, SizeLimitError
from .operators import SYMMETRIZERS, OperatorConfig
from .polarization import TwoAdditiveFuzzyMeasure

MAX_BRUTE_FORCE = 10

SetFunction = Callable[[frozenset], float]


def shapley_brute_force(measure: SetFunction, players: Iterable[int], i: int | None = None):
    """Average marginal contribution over every ordering of ``players``.

    ``measure`` is called with frozensets of player ids and is memoized here, so
    each coalition is evaluated once. Returns a float for a single ``i`` or a
    dict player -> value.
    """
    players = tuple(players)
    if len(players) > MAX_BRUTE_FORCE:
        raise SizeLimitError(
            f"brute force is capped at {MAX_BRUTE_FORCE} players (got {len(players)}); use shapley_closed_form"
        )
    if i is not None and i not in players:
        raise ContractViolation(f"player {i} not in {players}")
    cache: dict[frozenset, float] = {}

    def value(coalition: frozenset) -> float:
        if coalition not in cache:
            cache[coalition] = float(measure(coalition))
        return cache[coalition]

    targets = players if i is None else (i,)
    totals = {p: [] for p in targets}
    count = 0
    for order in permutations(players):
        count += 1
        pred: frozenset = frozenset()
        for p in order:
            nxt = pred | {p}
            if p in totals:
                totals[p].append(value(nxt) - value(pred))
            pred = nxt
    result = {p: math.fsum(v) / count for p, v in totals.items()}
    return result[i] if i is not None else result


def _row(m: TwoAdditiveFuzzyMeasure | np.ndarray) -> np.ndarray:
    return m.matrix.entries if isinstance(m, TwoAdditiveFuzzyMeasure) else np.asarray(m, dtype=float)


def shapley_closed_form(m, i: int | None = None, exact: bool = False):
    """Sh_i = sum_k P[i, k].

    With ``exact=True`` the sums are carried out in rational arithmetic on
    the (exactly representable) float entries and returned as Fractions.
    """
    p = _row(m)
    if i is None:
        return [shapley_closed_form(p, k, exact) for k in range(p.shape[0])]
    if exact:
        return sum((Fraction(float(x)) for x in p[i]), Fraction(0))
    return math.fsum(p[i])


def shapley_restricted(m, i: int, j: int, exact: bool = False):
    """Shapley value of ``i`` in the measure restricted to V minus ``j`` (no renormalization)."""
    if i == j:
        raise ContractViolation("restricted Shapley value needs i != j")
    p = _row(m)
    row = [p[i, k] for k in range(p.shape[0]) if k != j]
    if exact:
        return sum((Fraction(float(x)) for x in row), Fraction(0))
    return math.fsum(row)


@dataclass(frozen=True)
class ShapleyVector:
    values: tuple[float, ...]
    node_ids: tuple | None = None

    @classmethod
    def of(cls, m: TwoAdditiveFuzzyMeasure) -> "ShapleyVector":
        return cls(tuple(shapley_closed_form(m)), m.node_ids)

    def keyed(self) -> dict:
        ids = self.node_ids if self.node_ids is not None else range(len(self.values))
        return {str(k): v for k, v in zip(ids, self.values)}


@dataclass(frozen=True)
class AssociatedGraphMatrix:
    entries: np.ndarray
    symmetrizer: str


def removal_effects(m: TwoAdditiveFuzzyMeasure) -> np.ndarray:
    """D[i, j] = Sh_i - Sh_i^j, which collapses to P[i, j] for these measures."""
    d = np.array(m.matrix.entries, dtype=float)
    np.fill_diagonal(d, 0.0)
    return d


def associated_graph_from_effects(effects: np.ndarray, symmetrizer: str) -> AssociatedGraphMatrix:
    """F[i, j] = xi(D[i, j], D[j, i]) with a zero diagonal."""
    if symmetrizer not in SYMMETRIZERS:
        raise ContractViolation(f"unknown symmetrizer {symmetrizer!r}")
    d = np.asarray(effects, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ContractViolation("effects must be a square matrix")
    f = SYMMETRIZERS[symmetrizer](d, d.T)
    np.fill_diagonal(f, 0.0)
    f.setflags(write=False)
    return AssociatedGraphMatrix(f, symmetrizer)


def associated_graph(m: TwoAdditiveFuzzyMeasure, cfg: OperatorConfig | str) -> AssociatedGraphMatrix:
    symmetrizer = cfg if isinstance(cfg, str) else cfg.symmetrizer
    return associated_graph_from_effects(removal_effects(m), symmetrizer)
