"""Undirected weighted graphs: construction, edge-list ingestion, components,
Phase-2 aggregation and DOT / node-link JSON export."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ContractViolation, EdgeListError, EmptyGraphError, RejectedEdgeError
from .partition import Partition


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable undirected weighted graph.

    ``adjacency`` is symmetric with a zero diagonal. Aggregated graphs carry
    the intra-community weight of each super-node in ``self_weight`` (the
    unordered internal edge weight); it enters strengths and ``2m`` twice,
    like a self-loop, but never appears on the adjacency diagonal.
    """

    node_ids: tuple
    adjacency: np.ndarray
    self_weight: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        ids = tuple(self.node_ids)
        a = np.array(self.adjacency, dtype=float)
        n = len(ids)
        if a.shape != (n, n):
            raise ContractViolation(f"adjacency shape {a.shape} does not match {n} node ids")
        if len(set(ids)) != n:
            raise ContractViolation("node labels must be unique")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ContractViolation("edge weights must be finite and non-negative")
        if not np.array_equal(a, a.T):
            raise ContractViolation("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ContractViolation("adjacency diagonal must be zero")
        s = np.zeros(n) if self.self_weight is None else np.array(self.self_weight, dtype=float)
        if s.shape != (n,) or np.any(s < 0):
            raise ContractViolation("self_weight must be a non-negative vector, one entry per node")
        a.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "node_ids", ids)
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "self_weight", s)
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(ids)})

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def strengths(self) -> np.ndarray:
        return self.adjacency.sum(axis=1) + 2.0 * self.self_weight

    @property
    def total_weight(self) -> float:
        """m, half the grand sum of the ordered weight matrix."""
        return float(self.adjacency.sum() / 2.0 + self.self_weight.sum())

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def index_of(self, label) -> int:
        try:
            return self._index[label]  # type: ignore[attr-defined]
        except KeyError:
            raise ContractViolation(f"unknown node label {label!r}") from None

    def full_matrix(self) -> np.ndarray:
        """Ordered-pair weight matrix: adjacency plus ``2 * self_weight`` on the diagonal."""
        return self.adjacency + np.diag(2.0 * self.self_weight)

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(i, j, w)`` with ``i < j``, sorted by endpoints."""
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(i), int(j), float(self.adjacency[i, j])) for i, j in zip(iu, ju)]

    def binarized(self) -> "WeightedGraph":
        return WeightedGraph(self.node_ids, (self.adjacency > 0).astype(float))

    def induced(self, nodes: Sequence[int]) -> "WeightedGraph":
        idx = np.asarray(sorted(nodes), dtype=np.intp)
        return WeightedGraph(
            tuple(self.node_ids[i] for i in idx),
            self.adjacency[np.ix_(idx, idx)],
            self.self_weight[idx],
        )

    @classmethod
    def from_edges(cls, edges, node_ids: Sequence | None = None) -> "WeightedGraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` label tuples; repeats accumulate."""
        ids: dict = {}
        if node_ids is not None:
            for label in node_ids:
                ids.setdefault(label, len(ids))
        triples = []
        for e in edges:
            u, v = e[0], e[1]
            w = float(e[2]) if len(e) > 2 else 1.0
            if u == v:
                raise RejectedEdgeError(f"self-loop on {u!r}")
            triples.append((ids.setdefault(u, len(ids)), ids.setdefault(v, len(ids)), w))
        a = np.zeros((len(ids), len(ids)))
        for i, j, w in triples:
            a[i, j] += w
            a[j, i] += w
        return cls(tuple(ids), a)


# -- ingestion ---------------------------------------------------------------


def load_edge_list(path, directed_collapse: bool = True, binarize: bool = False) -> WeightedGraph:
    """Read an edge CSV (``source,target[,weight]`` header, ``#`` comments).

    Repeated rows accumulate into one undirected weight. With
    ``directed_collapse`` (the default) a ``(b, a)`` row adds to ``(a, b)``;
    without it, a reversed row is reported as an error, which is useful when
    the file is supposed to list each undirected edge once.
    """
    path = Path(path)
    ids: dict[str, int] = {}
    weights: dict[tuple[int, int], float] = {}
    seen_direction: dict[tuple[int, int], tuple[int, int]] = {}
    header = None
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if row[0].lstrip().startswith("#"):
                continue
            cells = [cell.strip() for cell in row]
            if header is None:
                header = cells
                if header[:2] != ["source", "target"] or header[2:] not in ([], ["weight"]):
                    raise EdgeListError(f"expected header 'source,target[,weight]', got {','.join(row)!r}", lineno)
                continue
            if len(cells) not in (2, len(header)):
                raise EdgeListError(f"expected {len(header)} fields, got {len(cells)}", lineno)
            src, dst = cells[0], cells[1]
            if not src or not dst:
                raise EdgeListError("empty node label", lineno)
            w = 1.0
            if len(cells) == 3 and cells[2] != "":
                try:
                    w = float(cells[2])
                except ValueError:
                    raise EdgeListError(f"bad weight {cells[2]!r}", lineno) from None
                if not np.isfinite(w) or w < 0:
                    raise EdgeListError(f"weight must be finite and non-negative, got {cells[2]!r}", lineno)
            if src == dst:
                raise RejectedEdgeError(f"self-loop on {src!r}", lineno)
            i = ids.setdefault(src, len(ids))
            j = ids.setdefault(dst, len(ids))
            key = (min(i, j), max(i, j))
            if not directed_collapse:
                first = seen_direction.setdefault(key, (i, j))
                if first != (i, j):
                    raise EdgeListError(f"reciprocal row {src},{dst} while directed_collapse is off", lineno)
            weights[key] = weights.get(key, 0.0) + w
    if header is None or not ids:
        raise EmptyGraphError(f"{path}: no edges")
    a = np.zeros((len(ids), len(ids)))
    for (i, j), w in weights.items():
        a[i, j] = a[j, i] = w
    g = WeightedGraph(tuple(ids), a)
    return g.binarized() if binarize else g


def write_edge_list(g: WeightedGraph, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "target", "weight"])
        for i, j, w in g.edges():
            writer.writerow([g.node_ids[i], g.node_ids[j], _fmt_weight(w)])


def _fmt_weight(w: float):
    return int(w) if float(w).is_integer() else repr(float(w))


# -- components --------------------------------------------------------------


def connected_sets(g: WeightedGraph) -> list[list[int]]:
    """Connected node-index sets, largest first; ties go to the set holding the smallest index."""
    if g.n == 0:
        raise EmptyGraphError("graph has no nodes")
    _, labels = connected_components(csr_matrix(g.adjacency), directed=False)
    groups: dict[int, list[int]] = {}
    for node, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(node)
    return sorted(groups.values(), key=lambda members: (-len(members), members[0]))


def largest_component(g: WeightedGraph) -> WeightedGraph:
    return g.induced(connected_sets(g)[0])


def is_connected_subset(adjacency: np.ndarray, nodes: Sequence[int]) -> bool:
    nodes = list(nodes)
    if len(nodes) <= 1:
        return True
    sub = adjacency[np.ix_(nodes, nodes)]
    ncomp, _ = connected_components(csr_matrix(sub), directed=False)
    return ncomp == 1


# -- aggregation -------------------------------------------------------------


def aggregate_matrix(w: np.ndarray, assignment) -> np.ndarray:
    """Community-sum a full (ordered, diagonal included) weight matrix.

    ``out[C, D] = sum(w[i, j] for i in C for j in D)``, including ``C == D``.
    """
    labels = np.asarray(assignment, dtype=np.intp)
    if labels.shape != (w.shape[0],):
        raise ContractViolation("assignment length does not match matrix size")
    c = int(labels.max()) + 1
    onehot = np.zeros((w.shape[0], c))
    onehot[np.arange(w.shape[0]), labels] = 1.0
    return onehot.T @ w @ onehot


def aggregate_by_partition(g: WeightedGraph, p: Partition) -> WeightedGraph:
    """One super-node per community, labelled by community id."""
    if p.n != g.n:
        raise ContractViolation(f"partition covers {p.n} nodes, graph has {g.n}")
    agg = aggregate_matrix(g.full_matrix(), p.assignment)
    self_w = np.diag(agg) / 2.0
    off = agg - np.diag(np.diag(agg))
    # onehot products can introduce asymmetric rounding on large weights
    off = (off + off.T) / 2.0
    return WeightedGraph(tuple(range(p.n_communities)), off, self_w)


# -- export ------------------------------------------------------------------

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def to_dot(g: WeightedGraph, partition: Partition | None = None, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for i, label in enumerate(g.node_ids):
        attrs = [f'label="{_dot_escape(label)}"']
        if partition is not None:
            cid = partition.assignment[i]
            attrs += [f"community={cid}", "style=filled", f'fillcolor="{_PALETTE[cid % len(_PALETTE)]}"']
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for i, j, w in g.edges():
        lines.append(f"  n{i} -- n{j} [weight={_fmt_weight(w)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(label) -> str:
    return str(label).replace("\\", "\\\\").replace('"', '\\"')


def to_node_link(g: WeightedGraph, partition: Partition | None = None) -> dict:
    nodes = []
    for i, label in enumerate(g.node_ids):
        node = {"index": i, "id": str(label), "strength": float(g.strengths[i])}
        if partition is not None:
            node["community"] = partition.assignment[i]
        nodes.append(node)
    links = [{"source": i, "target": j, "weight": w} for i, j, w in g.edges()]
    return {"directed": False, "nodes": nodes, "links": links}


def dump_node_link(g: WeightedGraph, partition: Partition | None = None) -> str:
    return json.dumps(to_node_link(g, partition), indent=2) + "\n"
