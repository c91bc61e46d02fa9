"""Modularity, classic Louvain and Polarization Louvain.

Polarization Louvain splits the two roles Louvain usually gives one matrix:
the structural adjacency ``A`` decides which communities a node may join
(only those of its ``A``-neighbours), while the blended matrix
``M = gamma * A + (1 - gamma) * F`` scores the moves. Both matrices are
community-summed between levels, and the recursion stops once a level
produces no merge.

A node only leaves its community when the rest of that community stays
connected in the current-level adjacency, so every community returned is a
connected subgraph of ``A`` (plain local moving can strand a community when
its bridge node departs).

All weight matrices handled here are *full*: ordered-pair weights with the
aggregated self-weight on the diagonal (see ``WeightedGraph.full_matrix``).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .capacity import AssociatedGraphMatrix, associated_graph
from .errors import ContractViolation, UndefinedModularityError
from .graph import WeightedGraph, aggregate_matrix, connected_sets, is_connected_subset
from .operators import OperatorConfig
from .partition import Partition
from .polarization import (
    CohesionReport,
    MembershipProfile,
    build_dialogue_matrix,
    build_risk_matrix,
    partition_cohesion,
    DIALOGUE,
    TwoAdditiveFuzzyMeasure,
)

# Rounding guard on the strict "gain > 0" test; real gains on graphs of a
# few thousand edges stay orders of magnitude above this.
MIN_GAIN = 1e-13


class DisconnectedGraphWarning(UserWarning):
    pass


def _full(w) -> np.ndarray:
    if isinstance(w, WeightedGraph):
        return w.full_matrix()
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ContractViolation("weight matrix must be square")
    return arr


def modularity(w, p: Partition | Sequence[int]) -> float:
    """Newman-Girvan Q of a partition, measured on ``w``'s own strengths."""
    w = _full(w)
    labels = p.as_array() if isinstance(p, Partition) else np.asarray(p, dtype=np.intp)
    if labels.shape != (w.shape[0],):
        raise ContractViolation("partition size does not match the weight matrix")
    two_m = float(w.sum())
    if w.shape[0] == 0 or two_m <= 0:
        raise UndefinedModularityError("modularity needs positive total weight")
    inner = np.diag(aggregate_matrix(w, labels))
    tot = np.bincount(labels, weights=w.sum(axis=1))
    return float(np.sum(inner / two_m - (tot / two_m) ** 2))


class LouvainState:
    """Running community bookkeeping for one level of local moving.

    ``adjacency`` supplies neighbourhoods (off-diagonal non-zeros only),
    ``weights`` supplies the modularity terms.
    """

    def __init__(self, adjacency: np.ndarray, weights: np.ndarray, labels: Sequence[int] | None = None):
        self.weights = _full(weights)
        n = self.weights.shape[0]
        adjacency = _full(adjacency)
        if adjacency.shape != (n, n):
            raise ContractViolation("adjacency and weight matrices differ in size")
        self.two_m = float(self.weights.sum())
        if n == 0 or self.two_m <= 0:
            raise UndefinedModularityError("modularity needs positive total weight")
        self.n = n
        self.strength = self.weights.sum(axis=1)
        self.neighbors = [np.flatnonzero((adjacency[i] != 0) & (np.arange(n) != i)) for i in range(n)]
        self._linked = (adjacency != 0) & ~np.eye(n, dtype=bool)
        self.labels = np.arange(n) if labels is None else np.array(labels, dtype=np.intp)
        self.tot = np.bincount(self.labels, weights=self.strength, minlength=n)
        self.size = np.bincount(self.labels, minlength=n)

    def links(self, i: int) -> np.ndarray:
        """Weight from ``i`` to every community, excluding ``i``'s own self-weight."""
        out = np.bincount(self.labels, weights=self.weights[i], minlength=self.n)
        out[self.labels[i]] -= self.weights[i, i]
        return out

    def _insert_gain(self, links_c, tot_c, k_i):
        return 2.0 * links_c / self.two_m - 2.0 * tot_c * k_i / self.two_m ** 2

    def delta_q(self, i: int, target: int) -> float:
        """Modularity change of moving ``i`` alone into community ``target``."""
        if not 0 <= target < self.n or self.size[target] == 0:
            raise ContractViolation(f"unknown community id {target}")
        cur = self.labels[i]
        if target == cur:
            return 0.0
        links = self.links(i)
        k_i = self.strength[i]
        return float(
            self._insert_gain(links[target], self.tot[target], k_i)
            - self._insert_gain(links[cur], self.tot[cur] - k_i, k_i)
        )

    def move(self, i: int, target: int) -> None:
        cur = self.labels[i]
        k_i = self.strength[i]
        self.tot[cur] -= k_i
        self.size[cur] -= 1
        self.tot[target] += k_i
        self.size[target] += 1
        self.labels[i] = target

    def leaving_keeps_connected(self, i: int) -> bool:
        """Whether ``i``'s community minus ``i`` is still connected in the adjacency."""
        rest = np.flatnonzero(self.labels == self.labels[i])
        rest = rest[rest != i]
        if rest.size <= 1:
            return True
        return is_connected_subset(self._linked, rest)

    def best_move(self, i: int) -> tuple[int, float]:
        """Best community among ``i``'s neighbours' and its gain; ties go to the smallest id."""
        cur = self.labels[i]
        nbrs = self.neighbors[i]
        if nbrs.size == 0:
            return cur, 0.0
        cands = np.unique(self.labels[nbrs])
        cands = cands[cands != cur]
        if cands.size == 0:
            return cur, 0.0
        links = self.links(i)
        k_i = self.strength[i]
        base = self._insert_gain(links[cur], self.tot[cur] - k_i, k_i)
        gains = self._insert_gain(links[cands], self.tot[cands], k_i) - base
        best = int(np.argmax(gains))
        return int(cands[best]), float(gains[best])


def delta_q(state: LouvainState, i: int, target: int) -> float:
    return state.delta_q(i, target)


@dataclass(frozen=True)
class PassRecord:
    """One Phase-1/Phase-2 round.

    ``partition`` is projected onto the nodes of the run, ``q`` is measured
    from scratch on the run's original weights, and ``steps`` holds the
    running Q before the first move and after every accepted move.
    """

    level: int
    partition: Partition
    q: float
    steps: tuple[float, ...]


@dataclass(frozen=True)
class LouvainTrace:
    seed: int
    passes: tuple[PassRecord, ...] = ()
    nodes: tuple[int, ...] | None = None
    parts: tuple["LouvainTrace", ...] = ()

    def all_passes(self) -> list[PassRecord]:
        out = list(self.passes)
        for part in self.parts:
            out.extend(part.all_passes())
        return out


def _local_moving(state: LouvainState, order: np.ndarray, q: float) -> list[float]:
    steps = [q]
    while True:
        moved = False
        for i in order:
            target, gain = state.best_move(int(i))
            if gain > MIN_GAIN and state.leaving_keeps_connected(int(i)):
                state.move(int(i), target)
                q += gain
                steps.append(q)
                moved = True
        if not moved:
            return steps


def _run_levels(adjacency: np.ndarray, weights: np.ndarray, rng: np.random.Generator, seed: int):
    n = adjacency.shape[0]
    node_comm = np.arange(n)
    a, w = adjacency, weights
    passes = []
    level = 0
    q = modularity(w, node_comm)
    while True:
        state = LouvainState(a, w)
        order = rng.permutation(state.n)
        steps = _local_moving(state, order, q)
        labels = np.asarray(Partition.from_assignment(state.labels).assignment, dtype=np.intp)
        node_comm = labels[node_comm]
        snapshot = Partition.from_assignment(node_comm)
        q = modularity(weights, snapshot)
        passes.append(PassRecord(level, snapshot, q, tuple(steps)))
        if labels.max() + 1 == state.n:
            break
        a = aggregate_matrix(a, labels)
        w = aggregate_matrix(w, labels)
        level += 1
    return Partition.from_assignment(node_comm), LouvainTrace(seed, tuple(passes))


def _two_role_louvain(adjacency: np.ndarray, weights: np.ndarray, seed: int) -> tuple[Partition, LouvainTrace]:
    rng = np.random.default_rng(seed)
    n = adjacency.shape[0]
    if n == 0:
        raise UndefinedModularityError("empty graph")
    comps = connected_sets(WeightedGraph(tuple(range(n)), adjacency - np.diag(np.diag(adjacency))))
    if len(comps) == 1:
        return _run_levels(adjacency, weights, rng, seed)
    warnings.warn(
        f"graph has {len(comps)} connected components; each is clustered on its own",
        DisconnectedGraphWarning,
        stacklevel=3,
    )
    labels = np.empty(n, dtype=np.intp)
    offset = 0
    parts = []
    for comp in sorted(comps, key=lambda c: c[0]):
        idx = np.asarray(comp)
        sub_w = weights[np.ix_(idx, idx)]
        if len(comp) == 1 or sub_w.sum() <= 0:
            sub = Partition.singletons(len(comp))
            part_trace = LouvainTrace(seed, nodes=tuple(comp))
        else:
            sub, part_trace = _run_levels(adjacency[np.ix_(idx, idx)], sub_w, rng, seed)
            part_trace = LouvainTrace(seed, part_trace.passes, tuple(comp))
        labels[idx] = sub.as_array() + offset
        offset += sub.n_communities
        parts.append(part_trace)
    return Partition.from_assignment(labels), LouvainTrace(seed, parts=tuple(parts))


def louvain(w, seed: int = 0) -> tuple[Partition, LouvainTrace]:
    """Classic Louvain: the same matrix supplies neighbourhoods and gains."""
    full = _full(w)
    return _two_role_louvain(full, full, seed)


# -- blending ------------------------------------------------------------------


@dataclass(frozen=True)
class BlendSpec:
    gamma: float = 1.0
    rescale: bool = False

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ContractViolation(f"gamma must lie in [0, 1], got {self.gamma}")


def blend(a, f, spec: BlendSpec) -> np.ndarray:
    """M = gamma * A + (1 - gamma) * F.

    With ``rescale`` F is first scaled so that it carries the same grand
    total as A.
    """
    a = _full(a)
    f = f.entries if isinstance(f, AssociatedGraphMatrix) else np.asarray(f, dtype=float)
    if a.shape != f.shape:
        raise ContractViolation(f"cannot blend {a.shape} with {f.shape}")
    if spec.rescale and f.sum() > 0:
        f = f * (a.sum() / f.sum())
    return spec.gamma * a + (1.0 - spec.gamma) * f


def polarization_louvain(g: WeightedGraph, f, spec: BlendSpec, seed: int = 0) -> tuple[Partition, LouvainTrace]:
    """Louvain with neighbourhoods from ``g`` and gains from the blend of ``g`` and ``f``."""
    m = blend(g, f, spec)
    return _two_role_louvain(g.full_matrix(), m, seed)


# -- sweeps --------------------------------------------------------------------


def feature_matrix(prof: MembershipProfile, cfg: OperatorConfig, kind: str = DIALOGUE) -> AssociatedGraphMatrix:
    """F for a profile: associated graph of the dialogue (default) or risk measure."""
    builder = build_dialogue_matrix if kind == DIALOGUE else build_risk_matrix
    return associated_graph(TwoAdditiveFuzzyMeasure(builder(prof, cfg), prof.node_ids), cfg)


@dataclass(frozen=True)
class SweepRow:
    label: str
    gamma: float | None
    partition: Partition
    q: float
    cohesion: CohesionReport

    @property
    def n_communities_gt1(self) -> int:
        return len(self.cohesion.communities)

    @property
    def pol(self) -> float:
        return self.cohesion.pol


@dataclass(frozen=True)
class SweepReport:
    seed: int
    operators: OperatorConfig
    rescale: bool
    norm_mode: str
    baseline: SweepRow
    rows: tuple[SweepRow, ...] = field(default=())

    def all_rows(self) -> list[SweepRow]:
        return [self.baseline, *self.rows]


def _sweep_point(args):
    g, f, gamma, rescale, seed, prof, cfg, norm_mode = args
    spec = BlendSpec(gamma, rescale)
    part, _ = polarization_louvain(g, f, spec, seed)
    q = modularity(blend(g, f, spec), part)
    return SweepRow(f"gamma={gamma:g}", gamma, part, q, partition_cohesion(part, prof, cfg, norm_mode))


def gamma_sweep(g: WeightedGraph, prof: MembershipProfile, cfg: OperatorConfig, gammas: Sequence[float],
                seed: int = 0, rescale: bool = False, norm_mode: str = "positive-pairs",
                kind: str = DIALOGUE, jobs: int = 1) -> SweepReport:
    """One Polarization Louvain run per gamma plus a classic Louvain baseline, all scored by pol(P)."""
    gammas = [float(x) for x in gammas]
    if not gammas:
        raise ContractViolation("gamma list is empty")
    for x in gammas:
        BlendSpec(x)
    if prof.n != g.n:
        raise ContractViolation("membership profile and graph differ in size")
    f = feature_matrix(prof, cfg, kind)
    base_part, _ = louvain(g, seed)
    baseline = SweepRow("louvain", None, base_part, modularity(g, base_part),
                        partition_cohesion(base_part, prof, cfg, norm_mode))
    tasks = [(g, f, x, rescale, seed, prof, cfg, norm_mode) for x in gammas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    return SweepReport(seed, cfg, rescale, norm_mode, baseline, tuple(rows))
