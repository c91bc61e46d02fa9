"""Planted-partition graphs with pole-aligned memberships."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ContractViolation
from .graph import WeightedGraph
from .polarization import MembershipProfile


@dataclass(frozen=True)
class SyntheticSpec:
    """Blocks alternate between the two poles: block ``b`` leans to pole A
    when ``b`` is odd and to pole B when it is even.

    ``pole_sharpness`` >= 1 is the Beta concentration of the pole-A degree
    towards its block's pole (1 is uniform). ``crisp`` replaces the draw by
    exact 0/1 degrees and switches the pole-B noise off.
    """

    nodes_per_block: int = 30
    blocks: int = 2
    intra_prob: float = 0.3
    inter_prob: float = 0.05
    pole_sharpness: float = 10.0
    seed: int = 0
    crisp: bool = False
    noise: float = 0.05

    def __post_init__(self):
        if self.blocks < 1 or self.nodes_per_block < 1:
            raise ContractViolation("need at least one block of at least one node")
        for name in ("intra_prob", "inter_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ContractViolation(f"{name} must lie in [0, 1]")
        if self.pole_sharpness < 1.0:
            raise ContractViolation("pole_sharpness must be >= 1")
        if not 0.0 <= self.noise <= 1.0:
            raise ContractViolation("noise must lie in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


def generate(spec: SyntheticSpec, drop_isolated: bool = True) -> tuple[WeightedGraph, MembershipProfile, np.ndarray]:
    """Return ``(graph, profile, block_of_node)``.

    Isolated nodes cannot be written to an edge list, so by default they are
    removed from all three outputs.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.nodes_per_block * spec.blocks
    block = np.repeat(np.arange(spec.blocks), spec.nodes_per_block)
    same = block[:, None] == block[None, :]
    prob = np.where(same, spec.intra_prob, spec.inter_prob)
    draws = rng.random((n, n))
    a = np.triu(draws < prob, 1).astype(float)
    a = a + a.T

    pole = (block % 2).astype(float)
    if spec.crisp:
        eta_a = pole.copy()
        eta_b = 1.0 - pole
    else:
        toward = rng.beta(spec.pole_sharpness, 1.0, size=n)
        eta_a = np.where(pole == 1.0, toward, 1.0 - toward)
        jitter = rng.uniform(-spec.noise, spec.noise, size=n)
        eta_b = np.clip(1.0 - eta_a + jitter, 0.0, 1.0)

    keep = np.arange(n)
    if drop_isolated:
        keep = np.flatnonzero(a.sum(axis=1) > 0)
    ids = tuple(str(i) for i in keep)
    g = WeightedGraph(ids, a[np.ix_(keep, keep)])
    prof = MembershipProfile(eta_a[keep], eta_b[keep], ids)
    return g, prof, block[keep]
