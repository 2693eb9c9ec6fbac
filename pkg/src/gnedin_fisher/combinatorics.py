"""Exact and floating-point combinatorial kernel.

Everything here is a pure function. Integer-exponent products work on any
numeric type that supports ``+`` and ``*``; pass :class:`fractions.Fraction`
arguments to get exact results.
"""
from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = [
    "DomainError",
    "SeriesConvergenceError",
    "LogScalar",
    "SetPartition",
    "SeriesResult",
    "rising_factorial",
    "rising_factorial_real_exponent",
    "falling_factorial_step",
    "lah_number",
    "noncentral_lah",
    "binomial",
    "bell_number",
    "gauss_2f1_sum",
    "gauss_2f1_series",
    "enumerate_set_partitions",
    "enumerate_compositions",
    "integer_partitions",
    "MAX_ENUMERATION_N",
]

MAX_ENUMERATION_N = 12


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class SeriesConvergenceError(ArithmeticError):
    """A power series did not reach the requested tolerance."""


@dataclass(frozen=True)
class LogScalar:
    """A real number stored as ``sign * exp(log_magnitude)``."""

    log_magnitude: float
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")

    @classmethod
    def from_value(cls, value: float) -> LogScalar:
        if value == 0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(value)), 1 if value > 0 else -1)

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __float__(self) -> float:
        return self.value

    def __mul__(self, other: LogScalar) -> LogScalar:
        if not isinstance(other, LogScalar):
            return NotImplemented
        sign = self.sign * other.sign
        if sign == 0:
            return LogScalar(-math.inf, 0)
        return LogScalar(self.log_magnitude + other.log_magnitude, sign)

    def __truediv__(self, other: LogScalar) -> LogScalar:
        if not isinstance(other, LogScalar):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScalar")
        if self.sign == 0:
            return self
        return LogScalar(self.log_magnitude - other.log_magnitude,
                         self.sign * other.sign)


def rising_factorial(x, m: int):
    """Pochhammer symbol ``x (x+1) ... (x+m-1)``; exact for rational ``x``."""
    if m < 0:
        raise DomainError(f"rising factorial needs m >= 0, got {m}")
    result = x ** 0  # keeps the type of x, so an empty product of Fractions is a Fraction
    for i in range(m):
        result *= x + i
    return result


def rising_factorial_real_exponent(x: float, t: float) -> LogScalar:
    """``Gamma(x + t) / Gamma(x)`` in log space, for real ``t``."""
    x = float(x)
    t = float(t)
    if x <= 0 or x + t <= 0:
        raise DomainError(f"need x > 0 and x + t > 0, got x={x}, t={t}")
    return LogScalar(math.lgamma(x + t) - math.lgamma(x), 1)


def falling_factorial_step(x, m: int):
    """``x (x-1) ... (x-m+1)``, the unit-step falling factorial."""
    if m < 0:
        raise DomainError(f"falling factorial needs m >= 0, got {m}")
    result = x ** 0
    for i in range(m):
        result *= x - i
    return result


def binomial(a: int, b: int) -> int:
    """Binomial coefficient that is zero off the usual support (incl. a < 0)."""
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def lah_number(n: int, k: int) -> int:
    """Unsigned Lah number ``C(n-1, k-1) n! / k!``."""
    if k < 1 or k > n:
        raise DomainError(f"Lah number needs 1 <= k <= n, got n={n}, k={k}")
    return math.comb(n - 1, k - 1) * math.factorial(n) // math.factorial(k)


def noncentral_lah(n: int, k: int, r: int) -> int:
    """Non-central Lah number ``(n!/k!) C(n-r-1, n-k)`` for ``r <= 0``.

    These are the coefficients in ``(x - r)^{(n)} = sum_k S(n, k; r) x_{(k)}``
    (rising on the left, falling on the right). With ``r = 0`` this is
    :func:`lah_number`.
    """
    if k < 0 or k > n or n < 0:
        raise DomainError(f"non-central Lah needs 0 <= k <= n, got n={n}, k={k}")
    if r > 0:
        raise DomainError(f"non-central Lah implemented for r <= 0, got r={r}")
    if k == n:
        return 1
    # n! / k! is an integer since k <= n
    return math.factorial(n) // math.factorial(k) * binomial(n - r - 1, n - k)


def bell_number(n: int) -> int:
    """Bell number via the Bell triangle."""
    if n < 0:
        raise DomainError("Bell number needs n >= 0")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


@dataclass(frozen=True)
class SeriesResult:
    value: float
    error: float
    terms: int
    converged: bool


def gauss_2f1_sum(a: float, b: float, c: float, x: float, *,
                  tol: float = 1e-12, max_terms: int = 10**6,
                  chunk: int = 2048) -> SeriesResult:
    """Sum the Gauss series ``sum (a)_i (b)_i / (c)_i x^i / i!`` for ``0 <= x < 1``.

    Summation stops at the first term ``t`` with ``|t| <= tol * (1 - r)``,
    where ``r`` is the current term ratio, so the geometric tail bound
    ``|t| r / (1 - r)`` is below ``tol``. Never raises on non-convergence;
    inspect ``converged`` and ``error``.
    """
    a, b, c, x = float(a), float(b), float(c), float(x)
    if not 0.0 <= x < 1.0:
        raise SeriesConvergenceError(f"series argument must lie in [0, 1), got {x}")
    if c <= 0 and c == math.floor(c):
        raise DomainError(f"c must not be a nonpositive integer, got {c}")
    if x == 0.0:
        return SeriesResult(1.0, 0.0, 1, True)

    total = 0.0
    term = 1.0
    start = 0
    while start < max_terms:
        size = min(chunk, max_terms - start)
        i = np.arange(start, start + size, dtype=float)
        ratios = (a + i) * (b + i) / ((c + i) * (i + 1.0)) * x
        # terms[j] is term number start + j
        terms = term * np.concatenate(([1.0], np.cumprod(ratios[:-1])))
        abs_r = np.abs(ratios)
        stop = (np.abs(terms) <= tol * (1.0 - abs_r)) & (abs_r < 1.0)
        hits = np.flatnonzero(stop | (terms == 0.0))
        if hits.size:
            j = int(hits[0])
            total += float(np.sum(terms[: j + 1]))
            r = float(abs_r[j])
            err = abs(float(terms[j])) * r / (1.0 - r) if r < 1.0 else math.inf
            return SeriesResult(total, err, start + j + 1, True)
        total += float(np.sum(terms))
        term = float(terms[-1] * ratios[-1])
        start += size
        if term == 0.0:
            return SeriesResult(total, 0.0, start, True)

    i_last = float(max_terms)
    r = abs((a + i_last) * (b + i_last) / ((c + i_last) * (i_last + 1.0)) * x)
    err = abs(term) / (1.0 - r) if r < 1.0 else math.inf
    return SeriesResult(total, err, max_terms, err <= tol)


def gauss_2f1_series(a: float, b: float, c: float, x: float, *,
                     tol: float = 1e-12, max_terms: int = 10**6) -> float:
    """Gauss hypergeometric function on ``[0, 1)`` by direct summation.

    Raises :class:`SeriesConvergenceError` when ``x`` is outside ``[0, 1)``
    or the term cap is reached before the tolerance.
    """
    res = gauss_2f1_sum(a, b, c, x, tol=tol, max_terms=max_terms)
    if not res.converged:
        raise SeriesConvergenceError(
            f"2F1({a}, {b}; {c}; {x}) did not converge in {max_terms} terms "
            f"(tail estimate {res.error:.3g})")
    return res.value


@dataclass(frozen=True)
class SetPartition:
    """A set partition of ``{1..n}``, blocks sorted by least element."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValueError("blocks must be nonempty")
            if seen.intersection(block):
                raise ValueError("blocks must be disjoint")
            seen.update(block)
        if seen != set(range(1, len(seen) + 1)):
            raise ValueError("blocks must cover {1..n}")
        canonical = tuple(sorted((tuple(sorted(b)) for b in self.blocks),
                                 key=lambda b: b[0]))
        object.__setattr__(self, "blocks", canonical)

    @classmethod
    def from_labels(cls, labels) -> SetPartition:
        """Partition induced by a sequence of box labels for balls 1..n."""
        groups: dict = {}
        for ball, label in enumerate(labels, start=1):
            groups.setdefault(label, []).append(ball)
        return cls(tuple(tuple(g) for g in groups.values()))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def restricted_growth_string(self) -> tuple[int, ...]:
        rgs = [0] * self.n
        for idx, block in enumerate(self.blocks):
            for ball in block:
                rgs[ball - 1] = idx
        return tuple(rgs)


def enumerate_set_partitions(n: int) -> Iterator[SetPartition]:
    """Yield all set partitions of ``{1..n}`` in restricted-growth-string order."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if n > MAX_ENUMERATION_N:
        raise DomainError(f"enumeration capped at n = {MAX_ENUMERATION_N}, got {n}")

    rgs = [0] * n

    def rec(pos: int, top: int):
        if pos == n:
            blocks: list[list[int]] = [[] for _ in range(top + 1)]
            for ball, label in enumerate(rgs, start=1):
                blocks[label].append(ball)
            yield SetPartition(tuple(tuple(b) for b in blocks))
            return
        for label in range(top + 2):
            rgs[pos] = label
            yield from rec(pos + 1, max(top, label))

    yield from rec(1, 0)


def enumerate_compositions(m: int, parts: int, min_part: int = 0) -> Iterator[tuple[int, ...]]:
    """Yield every length-``parts`` vector with entries >= ``min_part`` summing to ``m``."""
    if parts < 1:
        raise DomainError(f"need parts >= 1, got {parts}")
    if min_part not in (0, 1):
        raise DomainError("min_part must be 0 or 1")
    if m < parts * min_part:
        return
    if parts == 1:
        yield (m,)
        return
    for first in range(min_part, m - (parts - 1) * min_part + 1):
        for rest in enumerate_compositions(m - first, parts - 1, min_part):
            yield (first,) + rest


def integer_partitions(m: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``m`` as nonincreasing tuples; ``()`` for ``m == 0``."""
    if max_part is None:
        max_part = m
    if m == 0:
        yield ()
        return
    for first in range(min(m, max_part), 0, -1):
        for rest in integer_partitions(m - first, first):
            yield (first,) + rest


def is_rational(x) -> bool:
    return isinstance(x, (int, Rational)) and not isinstance(x, bool)


def as_exact(x):
    """Return ``Fraction(x)`` for ints and rationals, otherwise ``x`` unchanged."""
    if isinstance(x, Fraction):
        return x
    if is_rational(x):
        return Fraction(x)
    return x
