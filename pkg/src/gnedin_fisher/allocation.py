"""Sequential growth of partitions and multistep allocation probabilities.

Multistep rule values are probabilities of one specific assignment of the
labelled new balls (balls ``n+1, ..., n+m``). Summing over configurations
therefore needs the number of labelled assignments per configuration, see
:func:`configuration_multiplicity`. That convention was fixed by comparing
every rule against the exhaustive sequential-path oracle
(:func:`sequential_paths`).
"""
from __future__ import annotations

import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combinatorics import (DomainError, SetPartition, enumerate_compositions,
                            integer_partitions, rising_factorial)
from .laws import waring_sampler, xi_prior, xi_prior_log_pmf
from .models import GnedinFisherPsi, GnedinFisherZeta, one_step_rules
from .partition import OccupancyCounts, VerificationReport, as_counts

__all__ = [
    "GrowthState",
    "MultistepConfig",
    "XiSampler",
    "xi_sampler_for",
    "grow_one",
    "sample_sequential",
    "sample_two_stage",
    "multistep_old_prob",
    "multistep_new_prob",
    "multistep_mixed_prob",
    "multistep_prob",
    "configuration_multiplicity",
    "sequential_paths",
    "path_configuration",
    "verify_multistep_total",
    "verify_multistep_paths",
    "replicate_rng",
]

# A growth state is just the current block sizes.
GrowthState = OccupancyCounts

XI_INVERSE_CDF_MAX = 10**4
DIRICHLET_MAX_BOXES = 10**5


@dataclass(frozen=True)
class MultistepConfig:
    """Where ``m`` new balls go: ``old[j]`` into old block ``j``, ``new`` sizes of new blocks."""

    old: tuple[int, ...]
    new: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "old", tuple(int(x) for x in self.old))
        object.__setattr__(self, "new", tuple(int(x) for x in self.new))
        if any(x < 0 for x in self.old):
            raise DomainError("old-block increments must be >= 0")
        if any(s < 1 for s in self.new):
            raise DomainError("new block sizes must be >= 1")

    @property
    def m(self) -> int:
        return sum(self.old) + sum(self.new)

    @property
    def k_star(self) -> int:
        return len(self.new)


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    """Independent stream for replicate ``replicate``; independent of thread layout."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(replicate)])))


def _float_rules(model, counts: OccupancyCounts) -> np.ndarray:
    """One-step probabilities as floats: old blocks first, new block last."""
    n, k = counts.n, counts.k
    sizes = np.asarray(counts.counts, dtype=float)
    if isinstance(model, GnedinFisherPsi):
        g, p = float(model.gamma), float(model.psi)
        denom = n * n + n * g + p * (g - p)
        new = (k * k - k * g + p * (g - p)) / denom
    elif isinstance(model, GnedinFisherZeta):
        g, z = float(model.gamma), float(model.zeta)
        denom = n * n + g * n + z
        new = (k * k - g * k + z) / denom
    else:
        rules = one_step_rules(model, counts)
        return np.array([float(x) for x in rules.p_old] + [float(rules.p_new)])
    old = (n - k + g) * (sizes + 1.0) / denom
    return np.append(old, max(new, 0.0))


def _draw_index(probs: np.ndarray, u: float) -> int:
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, u * cum[-1], side="right"))
    return min(idx, len(probs) - 1)


def grow_one(model, state: GrowthState, rng) -> GrowthState:
    """Seat one more ball by the one-step rules."""
    rng = np.random.default_rng(rng)
    state = as_counts(state)
    j = _draw_index(_float_rules(model, state), rng.random())
    return state.add_new() if j == state.k else state.add_to(j)


def sample_sequential(model, n: int, rng) -> SetPartition:
    """Random partition of ``{1..n}`` grown ball by ball from ``{{1}}``."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(rng)
    state = OccupancyCounts((1,))
    labels = [0]
    for _ in range(n - 1):
        j = _draw_index(_float_rules(model, state), rng.random())
        if j == state.k:
            state = state.add_new()
        else:
            state = state.add_to(j)
        labels.append(j)
    return SetPartition.from_labels(labels)


class XiSampler:
    """Sampler for the mixing law of ``Xi``.

    Exact inverse CDF on ``xi <= XI_INVERSE_CDF_MAX``; beyond that, draws from
    the Beta-negative-binomial construction are rejected until they land in
    the tail, which is exact for the conditional tail law.
    """

    def __init__(self, model: GnedinFisherPsi, xi_max: int = XI_INVERSE_CDF_MAX):
        self.model = model
        self.xi_max = xi_max
        pmf = np.exp(xi_prior_log_pmf(model, np.arange(1, xi_max + 1)))
        self.cdf = np.cumsum(pmf)
        self.waring = xi_prior(model)

    def draw(self, rng) -> int:
        u = rng.random()
        if u < self.cdf[-1]:
            return int(np.searchsorted(self.cdf, u, side="right")) + 1
        while True:
            xi = waring_sampler(self.waring, rng)
            if xi > self.xi_max:
                return xi


@lru_cache(maxsize=32)
def xi_sampler_for(model: GnedinFisherPsi) -> XiSampler:
    return XiSampler(model)


def _dirichlet_labels(xi: int, n: int, rng: np.random.Generator) -> list[int]:
    if xi <= DIRICHLET_MAX_BOXES:
        weights = rng.dirichlet(np.ones(xi)) if xi > 1 else np.ones(1)
        return rng.choice(xi, size=n, p=weights).tolist()
    # Dirichlet(1,...,1)-multinomial urn: same law of labels, no xi-vector
    labels: list[int] = []
    sizes: list[int] = []
    for i in range(n):
        u = rng.random() * (i + xi)
        acc = 0.0
        for j, s in enumerate(sizes):
            acc += s + 1
            if u < acc:
                sizes[j] += 1
                labels.append(j)
                break
        else:
            sizes.append(1)
            labels.append(len(sizes) - 1)
    return labels


def sample_two_stage(model: GnedinFisherPsi, n: int, rng) -> SetPartition:
    """Draw ``Xi``, then Dirichlet(1,...,1) frequencies, then ``n`` i.i.d. labels."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(rng)
    xi = xi_sampler_for(model).draw(rng)
    return SetPartition.from_labels(_dirichlet_labels(xi, n, rng))


def _ratio_prefactor(model: GnedinFisherPsi, n: int, k: int, m: int, k_star: int):
    g, p = model.gamma, model.psi
    num = (rising_factorial(g + n - k, m - k_star) * rising_factorial(k - p, k_star)
           * rising_factorial(k - g + p, k_star))
    return num / (rising_factorial(p + n, m) * rising_factorial(g - p + n, m))


def _old_factor(counts: Sequence[int], m_vector: Sequence[int]):
    out = 1
    for nj, mj in zip(counts, m_vector):
        out *= rising_factorial(nj + 1, mj)
    return out


def multistep_old_prob(model: GnedinFisherPsi, state: GrowthState, m_vector: Sequence[int]):
    """(AO): all ``m`` new balls into old blocks, ``m_vector[j]`` into block ``j``."""
    c = as_counts(state)
    if len(m_vector) != c.k or any(x < 0 for x in m_vector):
        raise DomainError(f"m_vector must have {c.k} nonnegative entries, got {tuple(m_vector)}")
    m = sum(m_vector)
    return _ratio_prefactor(model, c.n, c.k, m, 0) * _old_factor(c.counts, m_vector)


def multistep_new_prob(model: GnedinFisherPsi, state: GrowthState, s_vector: Sequence[int]):
    """(AN): all new balls into ``len(s_vector)`` new blocks of the given sizes."""
    c = as_counts(state)
    if not s_vector or any(s < 1 for s in s_vector):
        raise DomainError(f"new block sizes must be >= 1, got {tuple(s_vector)}")
    m = sum(s_vector)
    return _ratio_prefactor(model, c.n, c.k, m, len(s_vector)) * math.prod(
        math.factorial(s) for s in s_vector)


def multistep_mixed_prob(model: GnedinFisherPsi, state: GrowthState,
                         m_vector: Sequence[int], s_vector: Sequence[int], *,
                         new_factor: str = "factorial"):
    """(ON): ``sum(s_vector)`` balls into new blocks, the rest into old ones.

    The new-block factor is ``prod s_j!``. ``new_factor="plain"`` gives the
    variant with ``prod s_j``, kept only so it can be compared against the
    path oracle, which rules it out.
    """
    if new_factor not in ("factorial", "plain"):
        raise DomainError(f"new_factor must be 'factorial' or 'plain', got {new_factor!r}")
    c = as_counts(state)
    if len(m_vector) != c.k or any(x < 0 for x in m_vector):
        raise DomainError(f"m_vector must have {c.k} nonnegative entries, got {tuple(m_vector)}")
    if not s_vector or any(s < 1 for s in s_vector):
        raise DomainError("mixed rule needs at least one new block; use multistep_old_prob")
    m = sum(m_vector) + sum(s_vector)
    new = math.prod(math.factorial(s) if new_factor == "factorial" else s for s in s_vector)
    return _ratio_prefactor(model, c.n, c.k, m, len(s_vector)) * _old_factor(c.counts, m_vector) * new


def multistep_prob(model: GnedinFisherPsi, state: GrowthState, config: MultistepConfig):
    """Dispatch to the (AO), (AN) or (ON) rule for ``config``."""
    c = as_counts(state)
    if not config.new:
        return multistep_old_prob(model, c, config.old)
    if not any(config.old):
        return multistep_new_prob(model, c, config.new)
    return multistep_mixed_prob(model, c, config.old, config.new)


def configuration_multiplicity(m_vector: Sequence[int], s_vector: Sequence[int]) -> int:
    """Labelled assignments of the new balls giving ``m_vector`` and the multiset ``s_vector``."""
    m = sum(m_vector) + sum(s_vector)
    denom = math.prod(math.factorial(x) for x in m_vector) * math.prod(
        math.factorial(s) for s in s_vector)
    denom *= math.prod(math.factorial(c) for c in Counter(s_vector).values())
    return math.factorial(m) // denom


def sequential_paths(model, state: GrowthState, m: int) -> dict[tuple[int, ...], object]:
    """Every sequence of ``m`` one-step moves with its exact probability.

    Labels ``0..k-1`` are the old blocks; ``k, k+1, ...`` are new blocks in
    order of creation.
    """
    start = as_counts(state)
    out: dict[tuple[int, ...], object] = {}

    def rec(cur: OccupancyCounts, path: tuple[int, ...], prob):
        if len(path) == m:
            out[path] = prob
            return
        rules = one_step_rules(model, cur)
        for j, pj in enumerate(rules.p_old):
            if pj != 0:
                rec(cur.add_to(j), path + (j,), prob * pj)
        if rules.p_new != 0:
            rec(cur.add_new(), path + (cur.k,), prob * rules.p_new)

    rec(start, (), Fraction(1) if _exact(model) else 1.0)
    return out


def _exact(model) -> bool:
    return bool(getattr(model, "exact", False))


def path_configuration(path: Sequence[int], k: int) -> MultistepConfig:
    """Configuration (old increments, new sizes in creation order) reached by a path."""
    old = [0] * k
    new: list[int] = []
    for label in path:
        if label < k:
            old[label] += 1
        else:
            idx = label - k
            if idx == len(new):
                new.append(0)
            new[idx] += 1
    return MultistepConfig(tuple(old), tuple(new))


def _configurations(k: int, m: int):
    for s_total in range(m + 1):
        new_options = [()] if s_total == 0 else list(integer_partitions(s_total))
        for s_vector in new_options:
            for m_vector in enumerate_compositions(m - s_total, k, 0):
                yield MultistepConfig(m_vector, s_vector)


def verify_multistep_total(model: GnedinFisherPsi, state: GrowthState, m: int) -> VerificationReport:
    """Sum rule value times multiplicity over all configurations of ``m`` new balls."""
    c = as_counts(state)
    if m < 1:
        raise DomainError("need m >= 1")
    if m > 6 or c.n > 6:
        raise DomainError("multistep oracle capped at m <= 6 and n <= 6")
    total = 0
    count = 0
    for cfg in _configurations(c.k, m):
        total += multistep_prob(model, c, cfg) * configuration_multiplicity(cfg.old, cfg.new)
        count += 1
    residual = total - 1
    ok = residual == 0 if isinstance(total, Fraction) else abs(residual) <= 1e-12
    return VerificationReport("multistep", ok, residual,
                              {"counts": ",".join(map(str, c.counts)), "m": m,
                               "configurations": count, "total": total})


def verify_multistep_paths(model: GnedinFisherPsi, state: GrowthState, m: int) -> VerificationReport:
    """Every sequential path probability must equal the rule value of its configuration."""
    c = as_counts(state)
    paths = sequential_paths(model, c, m)
    mismatches = 0
    worst = 0
    for path, prob in paths.items():
        cfg = path_configuration(path, c.k)
        diff = abs(prob - multistep_prob(model, c, cfg))
        if diff != 0:
            mismatches += 1
            worst = max(worst, diff)
    exact = _exact(model)
    ok = mismatches == 0 if exact else worst <= 1e-12
    return VerificationReport("multistep-paths", ok, worst,
                              {"counts": ",".join(map(str, c.counts)), "m": m,
                               "paths": len(paths), "mismatches": mismatches})
