"""Occupancy counts, the Gibbs-weight interface and EPPF-level oracles."""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Protocol, runtime_checkable

from .combinatorics import DomainError, SetPartition, bell_number, enumerate_set_partitions, lah_number

__all__ = [
    "OccupancyCounts",
    "GibbsWeights",
    "VerificationReport",
    "as_counts",
    "eppf",
    "eppf_of_set_partition",
    "verify_normalization",
    "verify_addition_rule",
    "blocks_pmf",
    "MAX_ORACLE_N",
]

MAX_ORACLE_N = 9
FLOAT_TOL = 1e-10


@dataclass(frozen=True)
class OccupancyCounts:
    """Block sizes ``(n_1, ..., n_k)`` of a partition of ``n`` balls."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise DomainError("occupancy counts need at least one block")
        if any(c < 1 for c in counts):
            raise DomainError(f"every block size must be >= 1, got {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __len__(self):
        return len(self.counts)

    def add_to(self, j: int) -> OccupancyCounts:
        """Counts after one more ball joins block ``j`` (0-based)."""
        c = list(self.counts)
        c[j] += 1
        return OccupancyCounts(tuple(c))

    def add_new(self) -> OccupancyCounts:
        return OccupancyCounts(self.counts + (1,))


def as_counts(counts) -> OccupancyCounts:
    if isinstance(counts, OccupancyCounts):
        return counts
    if isinstance(counts, SetPartition):
        return OccupancyCounts(counts.sizes)
    return OccupancyCounts(tuple(counts))


@runtime_checkable
class GibbsWeights(Protocol):
    """Anything exposing Gibbs weights ``V_{n,k}`` of a fixed genus ``alpha``."""

    alpha: int

    def weight(self, n: int, k: int) -> Any: ...


@dataclass
class VerificationReport:
    check: str
    ok: bool
    residual: Any = 0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        from .serialize import render_scalar

        return {
            "check": self.check,
            "ok": bool(self.ok),
            "residual": render_scalar(self.residual),
            "details": {k: render_scalar(v) for k, v in self.details.items()},
        }


def _factorial_product(counts: Sequence[int]) -> int:
    out = 1
    for c in counts:
        out *= math.factorial(c)
    return out


def eppf(model: GibbsWeights, counts) -> Any:
    """``V_{n,k} * prod n_j!``, the genus -1 Gibbs EPPF."""
    if model.alpha != -1:
        raise DomainError("only genus alpha = -1 models are supported")
    c = as_counts(counts)
    v = model.weight(c.n, c.k)
    if v == 0:
        return v
    return v * _factorial_product(c.counts)


def eppf_of_set_partition(model: GibbsWeights, partition: SetPartition) -> Any:
    return eppf(model, partition.sizes)


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction))


def verify_normalization(model: GibbsWeights, n: int) -> VerificationReport:
    """Sum the EPPF over every set partition of ``{1..n}``."""
    if n > MAX_ORACLE_N:
        raise DomainError(f"normalization oracle capped at n = {MAX_ORACLE_N}")
    weights = {k: model.weight(n, k) for k in range(1, n + 1)}
    total = 0
    for part in enumerate_set_partitions(n):
        v = weights[part.k]
        if v != 0:
            total += v * _factorial_product(part.sizes)
    residual = total - 1
    exact = _is_exact(total)
    ok = residual == 0 if exact else abs(residual) <= FLOAT_TOL
    return VerificationReport("normalization", ok, residual,
                              {"n": n, "total": total, "partitions": bell_number(n),
                               "backend": "exact" if exact else "float"})


def verify_addition_rule(model: GibbsWeights, counts) -> VerificationReport:
    """Check ``p(n) = sum_j p(n + e_j) + p(n, 1)``."""
    c = as_counts(counts)
    lhs = eppf(model, c)
    rhs = sum((eppf(model, c.add_to(j)) for j in range(c.k)), 0) + eppf(model, c.add_new())
    residual = lhs - rhs
    exact = _is_exact(lhs) and _is_exact(rhs)
    ok = residual == 0 if exact else abs(residual) <= FLOAT_TOL
    return VerificationReport("addition", ok, residual,
                              {"counts": ",".join(map(str, c.counts)), "lhs": lhs, "rhs": rhs})


def blocks_pmf(model: GibbsWeights, n: int) -> list:
    """Law of the block count: ``P(K_n = k) = V_{n,k} L(n, k)`` for ``k = 1..n``."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    return [model.weight(n, k) * lah_number(n, k) for k in range(1, n + 1)]
