"""Pairwise polarization risk, the risk/dialogue capacity matrices, their
2-additive fuzzy measures, and the partition cohesion score pol(P)."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ContractViolation,
    DegenerateDialogueError,
    DegeneratePolarizationError,
    MembershipError,
    UndefinedScoreError,
)
from .operators import GROUPINGS, NEGATIONS, OVERLAPS, OperatorConfig
from .partition import Partition

RISK = "risk"
DIALOGUE = "dialogue"
MIXED = "mixed"

NORM_MODES = ("positive-pairs", "all-pairs")


@dataclass(frozen=True)
class MembershipProfile:
    """Membership degrees of every node to the two poles.

    The two degrees of a node need not sum to one.
    """

    eta_a: np.ndarray
    eta_b: np.ndarray
    node_ids: tuple | None = None

    def __post_init__(self):
        a = np.array(self.eta_a, dtype=float)
        b = np.array(self.eta_b, dtype=float)
        if a.ndim != 1 or a.shape != b.shape:
            raise ContractViolation("eta_a and eta_b must be 1-d vectors of equal length")
        for name, v in (("eta_a", a), ("eta_b", b)):
            if np.any(np.isnan(v)) or np.any(v < 0) or np.any(v > 1):
                raise ContractViolation(f"{name} entries must lie in [0, 1]")
        if self.node_ids is not None and len(self.node_ids) != len(a):
            raise ContractViolation("node_ids length does not match membership vectors")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "eta_a", a)
        object.__setattr__(self, "eta_b", b)
        if self.node_ids is not None:
            object.__setattr__(self, "node_ids", tuple(self.node_ids))

    @property
    def n(self) -> int:
        return len(self.eta_a)

    def swapped(self) -> "MembershipProfile":
        return MembershipProfile(self.eta_b, self.eta_a, self.node_ids)

    def subset(self, nodes: Sequence[int]) -> "MembershipProfile":
        idx = list(nodes)
        ids = None if self.node_ids is None else tuple(self.node_ids[i] for i in idx)
        return MembershipProfile(self.eta_a[idx], self.eta_b[idx], ids)


def load_membership(path, node_ids: Sequence | None = None) -> MembershipProfile:
    """Read a ``node,eta_a,eta_b`` CSV.

    When ``node_ids`` is given the rows are reordered to match it and the
    label sets must agree exactly; offenders are listed in the error.
    """
    rows: dict[str, tuple[float, float]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if header is None:
                if cells != ["node", "eta_a", "eta_b"]:
                    raise MembershipError(f"line {lineno}: expected header 'node,eta_a,eta_b'")
                header = cells
                continue
            if len(cells) != 3:
                raise MembershipError(f"line {lineno}: expected 3 fields, got {len(cells)}")
            if cells[0] in rows:
                raise MembershipError(f"line {lineno}: duplicate node {cells[0]!r}")
            try:
                ea, eb = float(cells[1]), float(cells[2])
            except ValueError:
                raise MembershipError(f"line {lineno}: non-numeric membership degree") from None
            if not (0.0 <= ea <= 1.0 and 0.0 <= eb <= 1.0):
                raise MembershipError(f"line {lineno}: degrees must lie in [0, 1]")
            rows[cells[0]] = (ea, eb)
    if node_ids is None:
        order = list(rows)
    else:
        order = [str(x) for x in node_ids]
        missing = [x for x in order if x not in rows]
        extra = sorted(set(rows) - set(order))
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"missing membership for node(s): {', '.join(missing)}")
            if extra:
                parts.append(f"unknown node(s) in membership: {', '.join(extra)}")
            raise MembershipError("; ".join(parts), missing=missing, extra=extra)
    return MembershipProfile(
        [rows[x][0] for x in order],
        [rows[x][1] for x in order],
        tuple(order) if node_ids is None else tuple(node_ids),
    )


def write_membership(profile: MembershipProfile, path) -> None:
    ids = profile.node_ids if profile.node_ids is not None else range(profile.n)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "eta_a", "eta_b"])
        for label, a, b in zip(ids, profile.eta_a, profile.eta_b):
            writer.writerow([label, repr(float(a)), repr(float(b))])


# -- pairwise risk -------------------------------------------------------------


def pair_risk(i: int, j: int, prof: MembershipProfile, cfg: OperatorConfig) -> float:
    """Risk of conflict between two distinct nodes."""
    if i == j:
        raise ContractViolation("pair_risk needs two distinct nodes")
    overlap = OVERLAPS[cfg.overlap]
    a, b = prof.eta_a, prof.eta_b
    return float(GROUPINGS[cfg.grouping](overlap(a[i], b[j]), overlap(a[j], b[i])))


def pair_risk_matrix(prof: MembershipProfile, cfg: OperatorConfig) -> np.ndarray:
    """All pair risks at once; zero diagonal."""
    overlap = OVERLAPS[cfg.overlap]
    a, b = prof.eta_a, prof.eta_b
    ab = overlap(a[:, None], b[None, :])  # ab[i, j] = overlap(a_i, b_j)
    r = GROUPINGS[cfg.grouping](ab, ab.T)
    np.fill_diagonal(r, 0.0)
    return r


def jdj_pol(nodes: Iterable[int], prof: MembershipProfile, cfg: OperatorConfig,
            risk: np.ndarray | None = None) -> float:
    """Total risk over unordered pairs of distinct nodes in ``nodes``."""
    idx = sorted(set(nodes))
    if len(idx) < 2:
        return 0.0
    if risk is None:
        risk = pair_risk_matrix(prof.subset(idx), cfg)
    else:
        risk = risk[np.ix_(idx, idx)]
    return float(np.triu(risk, 1).sum())


# -- capacity matrices ---------------------------------------------------------


@dataclass(frozen=True)
class PairwiseCapacityMatrix:
    """Normalized symmetric pair matrix of a 2-additive measure.

    ``normalizer`` is the ordered-pair total the raw values were divided by.
    """

    entries: np.ndarray
    kind: str
    normalizer: float = 1.0

    def __post_init__(self):
        p = np.array(self.entries, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ContractViolation("capacity matrix must be square")
        if not np.array_equal(p, p.T):
            raise ContractViolation("capacity matrix must be symmetric")
        if np.any(np.diag(p) != 0) or np.any(p < 0):
            raise ContractViolation("capacity matrix needs a zero diagonal and non-negative entries")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ContractViolation(f"capacity matrix must sum to 1, got {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "entries", p)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class TwoAdditiveFuzzyMeasure:
    """mu(S) = sum of P over ordered pairs inside S."""

    matrix: PairwiseCapacityMatrix
    node_ids: tuple | None = field(default=None)

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def kind(self) -> str:
        return self.matrix.kind

    def __call__(self, nodes: Iterable[int]) -> float:
        return mu_value(self, nodes)


def _normalized(raw: np.ndarray, kind: str, error) -> PairwiseCapacityMatrix:
    total = math.fsum(raw.ravel())
    if total <= 0.0:
        raise error
    return PairwiseCapacityMatrix(raw / total, kind, total)


def build_risk_matrix(prof: MembershipProfile, cfg: OperatorConfig) -> PairwiseCapacityMatrix:
    if prof.n < 2:
        raise ContractViolation("need at least two nodes")
    raw = pair_risk_matrix(prof, cfg)
    return _normalized(raw, RISK, DegeneratePolarizationError("no conflict exists; risk measure undefined"))


def build_dialogue_matrix(prof: MembershipProfile, cfg: OperatorConfig) -> PairwiseCapacityMatrix:
    if prof.n < 2:
        raise ContractViolation("need at least two nodes")
    raw = NEGATIONS[cfg.negation](pair_risk_matrix(prof, cfg))
    np.fill_diagonal(raw, 0.0)
    return _normalized(raw, DIALOGUE, DegenerateDialogueError("no dialogue exists; dialogue measure undefined"))


def risk_measure(prof: MembershipProfile, cfg: OperatorConfig) -> TwoAdditiveFuzzyMeasure:
    return TwoAdditiveFuzzyMeasure(build_risk_matrix(prof, cfg), prof.node_ids)


def dialogue_measure(prof: MembershipProfile, cfg: OperatorConfig) -> TwoAdditiveFuzzyMeasure:
    return TwoAdditiveFuzzyMeasure(build_dialogue_matrix(prof, cfg), prof.node_ids)


def mu_value(m: TwoAdditiveFuzzyMeasure, nodes: Iterable[int]) -> float:
    idx = sorted(set(nodes))
    if not idx:
        return 0.0
    if idx[0] < 0 or idx[-1] >= m.n:
        raise ContractViolation(f"node index outside 0..{m.n - 1}")
    return float(m.matrix.entries[np.ix_(idx, idx)].sum())


def convex_combine(measures: Sequence[TwoAdditiveFuzzyMeasure], weights: Sequence[float]) -> TwoAdditiveFuzzyMeasure:
    """Measure whose matrix is the weighted sum of the inputs' matrices."""
    if not measures or len(measures) != len(weights):
        raise ContractViolation("need one weight per measure")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(math.fsum(w) - 1.0) > 1e-12:
        raise ContractViolation("weights must be non-negative and sum to 1")
    n = measures[0].n
    if any(m.n != n for m in measures):
        raise ContractViolation("all measures must share the node set")
    combined = sum(wk * m.matrix.entries for wk, m in zip(w, measures))
    kinds = {m.kind for m in measures}
    kind = kinds.pop() if len(kinds) == 1 else MIXED
    return TwoAdditiveFuzzyMeasure(PairwiseCapacityMatrix(combined, kind), measures[0].node_ids)


# -- cohesion score --------------------------------------------------------------


@dataclass(frozen=True)
class CommunityScore:
    community: int
    size: int
    jdj: float
    pairs: int
    normalized: float
    flagged: bool = False


@dataclass(frozen=True)
class CohesionReport:
    mode: str
    communities: tuple[CommunityScore, ...]
    pol: float
    pol_by_mode: dict

    def jdj_vector(self) -> list[float]:
        return [c.normalized for c in self.communities]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "communities": [
                {
                    "id": c.community,
                    "size": c.size,
                    "jdj": c.jdj,
                    "pairs": c.pairs,
                    "normalized": c.normalized,
                    "flagged": c.flagged,
                }
                for c in self.communities
            ],
            "pol": self.pol,
            "pol_by_mode": dict(self.pol_by_mode),
        }


def _community_scores(p: Partition, risk: np.ndarray, mode: str) -> list[CommunityScore]:
    scores = []
    for cid, members in enumerate(p.communities):
        if len(members) < 2:
            continue
        sub = np.triu(risk[np.ix_(members, members)], 1)
        total = float(sub.sum())
        if mode == "all-pairs":
            pairs = len(members) * (len(members) - 1) // 2
        else:
            pairs = int(np.count_nonzero(sub > 0))
        flagged = pairs == 0
        scores.append(CommunityScore(cid, len(members), total, pairs, 0.0 if flagged else total / pairs, flagged))
    return scores


def _weighted_pol(scores: Sequence[CommunityScore]) -> float:
    return math.fsum(s.normalized * s.size for s in scores) / sum(s.size for s in scores)


def partition_cohesion(p: Partition, prof: MembershipProfile, cfg: OperatorConfig,
                       norm_mode: str = "positive-pairs") -> CohesionReport:
    """Size-weighted mean of per-community normalized risk, over communities with more than one member.

    ``positive-pairs`` divides a community's total risk by the number of its
    pairs with non-zero risk; ``all-pairs`` by the number of all its pairs.
    A positive-pairs community without any risky pair scores 0 and is flagged.
    """
    if norm_mode not in NORM_MODES:
        raise ContractViolation(f"unknown norm mode {norm_mode!r}; choose from {NORM_MODES}")
    if p.n != prof.n:
        raise ContractViolation(f"partition covers {p.n} nodes, profile has {prof.n}")
    risk = pair_risk_matrix(prof, cfg)
    by_mode = {mode: _community_scores(p, risk, mode) for mode in NORM_MODES}
    if not by_mode[norm_mode]:
        raise UndefinedScoreError("no community has more than one member; pol(P) undefined")
    return CohesionReport(
        mode=norm_mode,
        communities=tuple(by_mode[norm_mode]),
        pol=_weighted_pol(by_mode[norm_mode]),
        pol_by_mode={mode: _weighted_pol(scores) for mode, scores in by_mode.items()},
    )
