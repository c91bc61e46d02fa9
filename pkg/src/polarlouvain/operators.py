"""Closed registry of the aggregation operators behind every measure.

grouping (outer disjunction), overlap (inner conjunction), negation, and the
symmetrizer used to build the associated graph. All of them are pure and
vectorized over numpy arrays; arguments outside their domain raise
:class:`ContractViolation` instead of being clamped.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ContractViolation


def _probabilistic_sum(x, y):
    return np.minimum(x + y - x * y, 1.0)


GROUPINGS = {
    "max": np.maximum,
    "probabilistic-sum": _probabilistic_sum,
}

OVERLAPS = {
    "min": np.minimum,
    "product": np.multiply,
    "geometric-mean": lambda x, y: np.sqrt(x * y),
}

NEGATIONS = {
    "standard": lambda x: 1.0 - x,
}

SYMMETRIZERS = {
    "max": np.maximum,
    "min": np.minimum,
    "mean": lambda x, y: (x + y) / 2.0,
}


@dataclass(frozen=True)
class OperatorConfig:
    grouping: str = "max"
    overlap: str = "product"
    negation: str = "standard"
    symmetrizer: str = "mean"

    def __post_init__(self):
        for key, registry in (
            ("grouping", GROUPINGS),
            ("overlap", OVERLAPS),
            ("negation", NEGATIONS),
            ("symmetrizer", SYMMETRIZERS),
        ):
            value = getattr(self, key)
            if value not in registry:
                raise ContractViolation(f"unknown {key} {value!r}; choose from {sorted(registry)}")

    def to_dict(self) -> dict:
        return asdict(self)


def _check_range(x, lo=0.0, hi=1.0, what="argument"):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < lo) or np.any(arr > hi):
        raise ContractViolation(f"{what} must lie in [{lo:g}, {hi:g}]")
    return arr


def _result(out):
    return float(out) if np.ndim(out) == 0 else out


def eval_grouping(cfg: OperatorConfig, x, y):
    xa, ya = _check_range(x), _check_range(y)
    return _result(GROUPINGS[cfg.grouping](xa, ya))


def eval_overlap(cfg: OperatorConfig, x, y):
    xa, ya = _check_range(x), _check_range(y)
    return _result(OVERLAPS[cfg.overlap](xa, ya))


def eval_negation(cfg: OperatorConfig, x):
    xa = _check_range(x)
    return _result(NEGATIONS[cfg.negation](xa))


def eval_symmetrizer(cfg: OperatorConfig, x, y):
    """xi: [-1, 1]^2 -> R, applied to pairs of Shapley differences."""
    xa = _check_range(x, -1.0, 1.0)
    ya = _check_range(y, -1.0, 1.0)
    return _result(SYMMETRIZERS[cfg.symmetrizer](xa, ya))
