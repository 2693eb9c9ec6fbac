"""Structural distribution: the limiting frequency of the block containing ball 1.

The law is an atom at 1 (the ``Xi = 1`` component) plus the density

    A (1-psi)(1-gamma+psi) y 2F1(2-psi, 2-gamma+psi; 2; 1-y),   0 < y < 1,

with ``A = Gamma(gamma+1-psi) Gamma(1+psi) / Gamma(gamma)``, the mixture over
``Xi`` of ``Beta(2, Xi-1)`` densities. Note the factor ``y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .allocation import xi_sampler_for
from .combinatorics import DomainError, gauss_2f1_sum
from .laws import _envelope_factor, xi_prior_log_pmf, xi_prior_tail_constant
from .models import GnedinFisherPsi
from .partition import VerificationReport

__all__ = [
    "StructuralLaw",
    "DensityEvaluation",
    "structural_law",
    "structural_atom",
    "structural_density",
    "structural_density_without_y",
    "evaluate_density",
    "structural_mass",
    "structural_mixture_pdf_check",
    "structural_sampler",
    "structural_cdf_one_parameter",
]


@dataclass(frozen=True)
class StructuralLaw:
    atom_mass: float
    density: Callable[[float], float]


@dataclass(frozen=True)
class DensityEvaluation:
    value: float
    error: float
    terms: int
    method: str  # "series" or "euler"


def structural_atom(model: GnedinFisherPsi) -> float:
    """Mass at ``y = 1``: ``Gamma(gamma+1-psi) Gamma(1+psi) / Gamma(gamma)``."""
    g, p = float(model.gamma), float(model.psi)
    return math.exp(math.lgamma(g + 1 - p) + math.lgamma(1 + p) - math.lgamma(g))


def _prefactor(model: GnedinFisherPsi) -> float:
    g, p = float(model.gamma), float(model.psi)
    return structural_atom(model) * (1 - p) * (1 - g + p)


def evaluate_density(model: GnedinFisherPsi, y: float, *, tol: float = 1e-12,
                     max_terms: int = 10**6, method: str = "auto") -> DensityEvaluation:
    """Density with an error estimate.

    Sums the series in ``1 - y`` directly; if the term cap is hit (small ``y``)
    it falls back to Euler's transformation
    ``2F1(a, b; c; x) = (1-x)^{c-a-b} 2F1(c-a, c-b; c; x)``, whose series
    converges at ``x = 1`` because ``c - a - b = gamma - 2 < 0`` flips sign.
    ``method`` may force ``"series"`` or ``"euler"``.
    """
    if method not in ("auto", "series", "euler"):
        raise ValueError(f"unknown method {method!r}")
    y = float(y)
    if not 0.0 < y < 1.0:
        raise DomainError(f"density is defined on (0, 1), got y={y}")
    g, p = float(model.gamma), float(model.psi)
    pre = _prefactor(model)
    if method != "euler":
        direct = gauss_2f1_sum(2 - p, 2 - g + p, 2.0, 1.0 - y, tol=tol, max_terms=max_terms)
        if direct.converged or method == "series":
            return DensityEvaluation(pre * y * direct.value, pre * y * direct.error, direct.terms, "series")
    euler = gauss_2f1_sum(p, g - p, 2.0, 1.0 - y, tol=tol, max_terms=max_terms)
    scale = pre * y ** (g - 1.0)
    return DensityEvaluation(scale * euler.value, scale * euler.error, euler.terms, "euler")


def structural_density(model: GnedinFisherPsi, y: float) -> float:
    return evaluate_density(model, y).value


def structural_density_without_y(model: GnedinFisherPsi, y: float) -> float:
    """The continuous part with the factor ``y`` dropped, for comparison only.

    It fails both the normalization and the ``psi = 0`` closed form.
    """
    return structural_density(model, y) / float(y)


def structural_law(model: GnedinFisherPsi) -> StructuralLaw:
    return StructuralLaw(structural_atom(model), lambda y: structural_density(model, y))


def structural_mass(model: GnedinFisherPsi) -> tuple[float, float]:
    """Atom plus the integral of the density, and the quadrature error estimate.

    The integrable ``y^{gamma-1}`` behaviour at 0 is handled by an algebraic
    quadrature weight; the integrand is ``density(y) / y^{gamma-1}``.
    """
    g, p = float(model.gamma), float(model.psi)
    # Gauss's summation theorem gives the limit of the smooth factor at y = 0
    at_zero = _prefactor(model) * math.exp(math.lgamma(2.0 - g) - math.lgamma(2.0 - p)
                                           - math.lgamma(2.0 - g + p))

    def smooth(y):
        if y < 1e-15:
            return at_zero
        if y >= 1.0:
            return _prefactor(model)
        return evaluate_density(model, y, tol=1e-13).value / y ** (g - 1.0)

    val, err = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(g - 1.0, 0.0),
                              epsabs=1e-11, epsrel=1e-11, limit=200)
    return structural_atom(model) + val, err


def _beta_mixture_tail_bound(model: GnedinFisherPsi, y: float, xi_max: int) -> float:
    """Bound on ``sum_{xi > xi_max} P(Xi=xi) xi (xi-1) y (1-y)^{xi-2}``."""
    g = float(model.gamma)
    c = xi_prior_tail_constant(model) * _envelope_factor(model, xi_max + 1)
    # P(Xi=xi) xi (xi-1) <= c xi^{1-gamma}; the resulting terms shrink geometrically
    first = c * (xi_max + 1.0) ** (1.0 - g) * y * (1.0 - y) ** (xi_max - 1)
    q = (1.0 - y) * max(1.0, ((xi_max + 2.0) / (xi_max + 1.0)) ** (1.0 - g))
    if q >= 1.0:
        return math.inf
    return first / (1.0 - q)


def structural_mixture_pdf_check(model: GnedinFisherPsi, y: float, xi_max: int = 10**4,
                                 tol: float = 1e-6) -> VerificationReport:
    """Direct density against the explicit ``Beta(2, xi-1)`` mixture partial sum."""
    if not 0.0 < y < 1.0:
        raise DomainError(f"y must lie in (0, 1), got {y}")
    xi = np.arange(2, xi_max + 1, dtype=float)
    log_terms = (xi_prior_log_pmf(model, xi) + np.log(xi) + np.log(xi - 1.0)
                 + math.log(y) + (xi - 2.0) * math.log1p(-y))
    partial = math.fsum(np.exp(log_terms).tolist())
    tail = _beta_mixture_tail_bound(model, y, xi_max)
    direct = evaluate_density(model, y)
    diff = abs(direct.value - partial)
    ok = diff <= tail + direct.error + tol
    return VerificationReport("structural-mixture", ok, diff,
                              {"y": y, "xi_max": xi_max, "direct": direct.value,
                               "partial_sum": partial, "tail_bound": tail,
                               "method": direct.method})


def structural_sampler(model: GnedinFisherPsi, rng, size: int | None = None):
    """Draw ``Xi`` from the mixing law, return 1 if ``Xi = 1`` else a ``Beta(2, Xi-1)`` draw."""
    rng = np.random.default_rng(rng)
    sampler = xi_sampler_for(model)

    def one() -> float:
        xi = sampler.draw(rng)
        return 1.0 if xi == 1 else float(rng.beta(2.0, xi - 1.0))

    if size is None:
        return one()
    return np.array([one() for _ in range(size)])


def structural_cdf_one_parameter(gamma: float, y):
    """CDF at ``psi = 0``: ``(1-gamma) y^gamma`` on ``[0, 1)``, jumping to 1 at ``y = 1``."""
    g = float(gamma)
    y = np.asarray(y, dtype=float)
    out = np.where(y >= 1.0, 1.0, (1.0 - g) * np.clip(y, 0.0, None) ** g)
    return float(out) if out.ndim == 0 else out
