"""Gnedin-Fisher parametrizations and the Fisher PD(-1, xi) extreme models.

All models are genus ``alpha = -1`` Gibbs partitions: the EPPF is
``V_{n,k} * prod n_j!``. Parameters given as ints or Fractions are kept
exact; a mix of exact and float parameters is promoted to floats and the
model's ``promoted`` flag is set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .combinatorics import (DomainError, as_exact, falling_factorial_step,
                            is_rational, rising_factorial)
from .partition import OccupancyCounts, as_counts

__all__ = [
    "InvalidParameterError",
    "ZetaValidation",
    "GnedinFisherZeta",
    "GnedinFisherPsi",
    "GnedinFisherOne",
    "FisherExtreme",
    "NotRepresentable",
    "OneStepRules",
    "validate_zeta",
    "psi_to_zeta",
    "zeta_to_psi",
    "weight_zeta",
    "weight_psi",
    "weight_one_parameter",
    "weight_fisher",
    "one_step_rules",
]


class InvalidParameterError(DomainError):
    """Model parameters violate the model's validity domain."""


def _coerce(*values):
    """Keep all values exact if possible, else promote everything to float."""
    if all(is_rational(v) for v in values):
        return tuple(as_exact(v) for v in values), False
    mixed = any(is_rational(v) for v in values)
    return tuple(float(v) for v in values), mixed


def _is_zero(q) -> bool:
    if isinstance(q, Fraction):
        return q == 0
    return abs(q) <= 1e-12


@dataclass(frozen=True)
class ZetaValidation:
    case: str  # "i", "ii" or "invalid"
    i0: int | None = None
    violation_at: int | None = None
    reason: str = ""

    @property
    def valid(self) -> bool:
        return self.case != "invalid"


def validate_zeta(gamma, zeta) -> ZetaValidation:
    """Classify ``i^2 - gamma i + zeta`` over the positive integers.

    Case ``"i"``: strictly positive everywhere. Case ``"ii"``: positive up to a
    root at ``i0``. Anything else is invalid; ``violation_at`` is the first
    offending index. The denominators ``l^2 + gamma l + zeta`` must also be
    positive.
    """
    (gamma, zeta), _ = _coerce(gamma, zeta)
    if gamma < 0:
        return ZetaValidation("invalid", violation_at=None, reason="gamma must be >= 0")
    # l^2 + gamma l + zeta increases in l when gamma >= 0
    if 1 + gamma + zeta <= 0 or _is_zero(1 + gamma + zeta):
        return ZetaValidation("invalid", violation_at=1,
                              reason="denominator l^2 + gamma*l + zeta vanishes or is negative at l=1")
    i = 1
    while True:
        q = i * i - gamma * i + zeta
        if _is_zero(q):
            return ZetaValidation("ii", i0=i, reason=f"quadratic has a root at i0={i}")
        if q < 0:
            return ZetaValidation("invalid", violation_at=i,
                                  reason=f"i^2 - gamma*i + zeta < 0 at i={i}")
        if 2 * i >= gamma:
            return ZetaValidation("i", reason="quadratic positive for all i >= 1")
        i += 1


@dataclass(frozen=True)
class GnedinFisherZeta:
    """The ``(gamma, zeta)`` Gnedin-Fisher model."""

    gamma: object
    zeta: object
    promoted: bool = field(default=False, compare=False)
    validation: ZetaValidation = field(default=None, compare=False, repr=False)
    alpha = -1

    def __post_init__(self):
        (g, z), promoted = _coerce(self.gamma, self.zeta)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "zeta", z)
        object.__setattr__(self, "promoted", promoted or self.promoted)
        check = validate_zeta(g, z)
        if not check.valid:
            raise InvalidParameterError(f"invalid (gamma, zeta)=({g}, {z}): {check.reason}")
        object.__setattr__(self, "validation", check)

    @property
    def case(self) -> str:
        return self.validation.case

    @property
    def i0(self) -> int | None:
        return self.validation.i0

    @property
    def exact(self) -> bool:
        return isinstance(self.gamma, Fraction)

    def weight(self, n: int, k: int):
        return weight_zeta(self, n, k)

    def one_step(self, counts) -> OneStepRules:
        c = as_counts(counts)
        n, k, g, z = c.n, c.k, self.gamma, self.zeta
        denom = n * n + g * n + z
        old = tuple((n - k + g) * (nj + 1) / denom for nj in c.counts)
        new = (k * k - g * k + z) / denom
        return OneStepRules(old, new)

    def params(self) -> dict:
        return {"gamma": self.gamma, "zeta": self.zeta}


@dataclass(frozen=True)
class GnedinFisherPsi:
    """The ``(gamma, psi)`` reparametrization with ``psi in [0, 1)``, ``0 < gamma < psi + 1``."""

    gamma: object
    psi: object
    promoted: bool = field(default=False, compare=False)
    alpha = -1

    def __post_init__(self):
        (g, p), promoted = _coerce(self.gamma, self.psi)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "psi", p)
        object.__setattr__(self, "promoted", promoted or self.promoted)
        if not 0 <= p < 1:
            raise InvalidParameterError(f"psi must lie in [0, 1), got {p}")
        if not 0 < g < p + 1:
            raise InvalidParameterError(f"gamma must lie in (0, psi + 1) = (0, {p + 1}), got {g}")

    @property
    def exact(self) -> bool:
        return isinstance(self.gamma, Fraction)

    @property
    def zeta(self):
        return self.psi * (self.gamma - self.psi)

    def weight(self, n: int, k: int):
        return weight_psi(self, n, k)

    def one_step(self, counts) -> OneStepRules:
        c = as_counts(counts)
        n, k, g, p = c.n, c.k, self.gamma, self.psi
        cross = p * (g - p)
        denom = n * n + n * g + cross
        old = tuple((n - k + g) * (nj + 1) / denom for nj in c.counts)
        new = (k * k - k * g + cross) / denom
        return OneStepRules(old, new)

    def as_floats(self) -> tuple[float, float]:
        return float(self.gamma), float(self.psi)

    def params(self) -> dict:
        return {"gamma": self.gamma, "psi": self.psi}


@dataclass(frozen=True)
class GnedinFisherOne:
    """One-parameter model ``gamma in (0, 1)``, weights in their closed form."""

    gamma: object
    alpha = -1

    def __post_init__(self):
        (g,), _ = _coerce(self.gamma)
        object.__setattr__(self, "gamma", g)
        if not 0 < g < 1:
            raise InvalidParameterError(f"gamma must lie in (0, 1), got {g}")

    def weight(self, n: int, k: int):
        return weight_one_parameter(self.gamma, n, k)

    def params(self) -> dict:
        return {"gamma": self.gamma}


@dataclass(frozen=True)
class FisherExtreme:
    """Fisher's PD(-1, xi) model: symmetric Dirichlet(1, ..., 1) over ``xi`` boxes."""

    xi: int
    alpha = -1

    def __post_init__(self):
        if int(self.xi) != self.xi or self.xi < 1:
            raise InvalidParameterError(f"xi must be a positive integer, got {self.xi}")
        object.__setattr__(self, "xi", int(self.xi))

    def weight(self, n: int, k: int):
        return weight_fisher(self, n, k)

    def one_step(self, counts) -> OneStepRules:
        c = as_counts(counts)
        denom = Fraction(c.n + self.xi)
        return OneStepRules(tuple((nj + 1) / denom for nj in c.counts),
                            (self.xi - c.k) / denom if c.k <= self.xi else Fraction(0))

    def params(self) -> dict:
        return {"xi": self.xi}


GibbsModel = Union[GnedinFisherZeta, GnedinFisherPsi, GnedinFisherOne, FisherExtreme]


@dataclass(frozen=True)
class NotRepresentable:
    """A ``(gamma, zeta)`` model with no real ``psi`` in the valid range."""

    gamma: object
    zeta: object
    discriminant: object
    reason: str


def psi_to_zeta(model: GnedinFisherPsi) -> GnedinFisherZeta:
    return GnedinFisherZeta(model.gamma, model.psi * (model.gamma - model.psi),
                            promoted=model.promoted)


def _exact_sqrt(q: Fraction) -> Fraction | None:
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def zeta_to_psi(model: GnedinFisherZeta) -> GnedinFisherPsi | NotRepresentable:
    """Recover ``psi`` from ``zeta = psi (gamma - psi)``.

    The smaller root is preferred; the larger is used only when the smaller
    one falls outside the valid range (both give the same weights).
    """
    g, z = model.gamma, model.zeta
    disc = g * g - 4 * z
    if disc < 0:
        return NotRepresentable(g, z, disc, "complex roots: gamma^2 - 4 zeta < 0")
    root = _exact_sqrt(disc) if isinstance(disc, Fraction) else None
    if root is None:
        root = math.sqrt(float(disc))
        g_num = float(g)
    else:
        g_num = g
    for psi in ((g_num - root) / 2, (g_num + root) / 2):
        if 0 <= psi < 1 and 0 < g_num < psi + 1:
            return GnedinFisherPsi(g_num, psi, promoted=model.promoted)
    return NotRepresentable(g, z, disc, "real roots outside psi in [0, 1) with gamma < psi + 1")


def weight_zeta(model: GnedinFisherZeta, n: int, k: int):
    """``(gamma)_{n-k} prod_{i<k}(i^2 - gamma i + zeta) / prod_{l<n}(l^2 + gamma l + zeta)``."""
    _check_nk(n, k)
    g, z = model.gamma, model.zeta
    if model.i0 is not None and k > model.i0:
        return Fraction(0) if model.exact else 0.0
    num = rising_factorial(g, n - k)
    for i in range(1, k):
        num *= i * i - g * i + z
    den = 1
    for l in range(1, n):
        den *= l * l + g * l + z
    return num / den if model.exact else float(num) / float(den)


def weight_psi(model: GnedinFisherPsi, n: int, k: int):
    """``(gamma)_{n-k} (1-psi)_{k-1} (1-gamma+psi)_{k-1} / ((1+psi)_{n-1} (1+gamma-psi)_{n-1})``."""
    _check_nk(n, k)
    g, p = model.gamma, model.psi
    num = rising_factorial(g, n - k) * rising_factorial(1 - p, k - 1) * rising_factorial(1 - g + p, k - 1)
    den = rising_factorial(1 + p, n - 1) * rising_factorial(1 + g - p, n - 1)
    return num / den if model.exact else float(num) / float(den)


def weight_one_parameter(gamma, n: int, k: int):
    """``(k-1)!/(n-1)! (1-gamma)_{k-1} (gamma)_{n-k} / (1+gamma)_{n-1}``."""
    _check_nk(n, k)
    (g,), _ = _coerce(gamma)
    num = math.factorial(k - 1) * rising_factorial(1 - g, k - 1) * rising_factorial(g, n - k)
    den = math.factorial(n - 1) * rising_factorial(1 + g, n - 1)
    return Fraction(num) / den if isinstance(g, Fraction) else num / den


def weight_fisher(model: FisherExtreme | int, n: int, k: int) -> Fraction:
    """``(xi-1)(xi-2)...(xi-k+1) / (xi+1)_{n-1}``; zero when ``k > xi``."""
    _check_nk(n, k)
    xi = model.xi if isinstance(model, FisherExtreme) else int(model)
    return Fraction(falling_factorial_step(xi - 1, k - 1), rising_factorial(xi + 1, n - 1))


def _check_nk(n: int, k: int):
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")


@dataclass(frozen=True)
class OneStepRules:
    """Predictive probabilities of the next ball: old block ``j`` or a new block."""

    p_old: tuple
    p_new: object

    @property
    def total(self):
        return sum(self.p_old, 0) + self.p_new


def one_step_rules(model, counts: OccupancyCounts | tuple) -> OneStepRules:
    """One-step (O)/(N) rules; models without a closed form use EPPF ratios."""
    if hasattr(model, "one_step"):
        return model.one_step(counts)
    c = as_counts(counts)
    v = model.weight(c.n, c.k)
    if v == 0:
        raise DomainError(f"counts {c.counts} have probability zero under {model}")
    old = tuple(model.weight(c.n + 1, c.k) * (nj + 1) / v for nj in c.counts)
    return OneStepRules(old, model.weight(c.n + 1, c.k + 1) / v)
