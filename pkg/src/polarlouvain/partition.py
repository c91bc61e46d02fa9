"""Node-to-community assignments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation


@dataclass(frozen=True)
class Partition:
    """A partition of ``n`` node indices.

    ``assignment[i]`` is the community id of node ``i``. Ids are always
    compacted: contiguous from 0, numbered in order of first appearance
    when scanning nodes by index.
    """

    assignment: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(c) for c in self.assignment)
        if labels != _compact(labels):
            raise ContractViolation("partition ids must be compacted; use Partition.from_assignment")
        object.__setattr__(self, "assignment", labels)

    @classmethod
    def from_assignment(cls, labels: Iterable) -> "Partition":
        return cls(_compact(tuple(labels)))

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[int]], n: int) -> "Partition":
        labels = [-1] * n
        for cid, members in enumerate(communities):
            for node in members:
                if not 0 <= node < n:
                    raise ContractViolation(f"node index {node} outside 0..{n - 1}")
                if labels[node] != -1:
                    raise ContractViolation(f"node {node} appears in two communities")
                labels[node] = cid
        missing = [i for i, c in enumerate(labels) if c == -1]
        if missing:
            raise ContractViolation(f"partition does not cover nodes {missing}")
        return cls.from_assignment(labels)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def n_communities(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    @property
    def communities(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_communities)]
        for node, cid in enumerate(self.assignment):
            out[cid].append(node)
        return out

    def as_array(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.intp)

    def labelled(self, node_ids: Sequence) -> dict[int, list]:
        """Community id -> list of node labels."""
        return {cid: [node_ids[i] for i in members] for cid, members in enumerate(self.communities)}


def _compact(labels: tuple) -> tuple[int, ...]:
    remap: dict = {}
    return tuple(remap.setdefault(c, len(remap)) for c in labels)
