"""Laws of the block count ``K_n`` and of the latent species number ``Xi``.

The prior and posterior of ``Xi`` are shifted generalized Waring laws; the
``K_n`` and new-block laws are rational in rational parameters and are kept
exact when the model is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .combinatorics import (DomainError, binomial, lah_number, noncentral_lah,
                            rising_factorial, rising_factorial_real_exponent)
from .models import GnedinFisherPsi, weight_fisher, weight_psi
from .partition import VerificationReport

__all__ = [
    "GeneralizedWaring",
    "MomentNonexistent",
    "waring_pmf",
    "waring_log_pmf",
    "waring_moment",
    "waring_sampler",
    "xi_prior",
    "xi_prior_pmf",
    "xi_prior_log_pmf",
    "xi_prior_pmf_one_parameter",
    "xi_prior_tail_constant",
    "xi_prior_tail_bound",
    "xi_posterior",
    "xi_posterior_pmf",
    "unseen_species_pmf_one_parameter",
    "blocks_pmf_two_param",
    "blocks_log_pmf_two_param",
    "blocks_pmf_one_parameter",
    "new_blocks_posterior",
    "new_blocks_posterior_gibbs",
    "fisher_log_weight",
    "verify_mixture",
    "verify_bayes_identity",
    "blocks_prior_tv_distance",
]


@dataclass(frozen=True)
class GeneralizedWaring:
    """Generalized Waring law on ``{shift, shift+1, ...}``.

    ``P(N = shift + i) = (rho)_eta / i! * (a)_i (eta)_i / (a + rho)_{eta + i}``,
    the ``Beta(rho, a)`` mixture of negative binomials ``NB(eta, p)``.
    """

    a: float
    eta: float
    rho: float
    shift: int = 0

    def __post_init__(self):
        for name in ("a", "eta", "rho"):
            v = float(getattr(self, name))
            if not v > 0:
                raise DomainError(f"generalized Waring parameter {name} must be > 0, got {v}")
            object.__setattr__(self, name, v)
        if self.shift < 0 or int(self.shift) != self.shift:
            raise DomainError("shift must be a nonnegative integer")

    def log_pmf(self, x):
        """Log mass at support points ``x`` (already shifted); ``-inf`` below the shift."""
        x = np.asarray(x)
        i = x - self.shift
        a, eta, rho = self.a, self.eta, self.rho
        with np.errstate(invalid="ignore"):
            ii = np.where(i >= 0, i, 0).astype(float)
            out = (gammaln(rho + eta) - gammaln(rho) - gammaln(ii + 1.0)
                   + gammaln(a + ii) - gammaln(a) + gammaln(eta + ii) - gammaln(eta)
                   - gammaln(a + rho + eta + ii) + gammaln(a + rho))
        out = np.where(i >= 0, out, -np.inf)
        return float(out) if out.ndim == 0 else out

    def pmf(self, x):
        return np.exp(self.log_pmf(x))


@dataclass(frozen=True)
class MomentNonexistent:
    order: int
    rho: float
    reason: str = "moment of this order is infinite (needs rho > order)"


def waring_log_pmf(d: GeneralizedWaring, i):
    return d.log_pmf(np.asarray(i) + d.shift)


def waring_pmf(d: GeneralizedWaring, i: int) -> float:
    """Mass at pre-shift index ``i >= 0``."""
    if i < 0:
        raise DomainError(f"index must be >= 0, got {i}")
    return float(np.exp(waring_log_pmf(d, i)))


def _stirling2(r: int, j: int) -> int:
    # sum formula; r is small
    return sum((-1) ** (j - t) * math.comb(j, t) * t ** r for t in range(j + 1)) // math.factorial(j)


def waring_moment(d: GeneralizedWaring, order: int) -> float | MomentNonexistent:
    """Raw moment ``E[X^order]`` of the (shifted) variable.

    Uses the factorial moments ``E[(N)_r] = (a)_r (eta)_r / ((rho - r) ... (rho - 1))``
    of the unshifted count.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    if d.rho <= order:
        return MomentNonexistent(order, d.rho)
    fact = [1.0]
    for r in range(1, order + 1):
        denom = math.prod(d.rho - j for j in range(1, r + 1))
        fact.append(rising_factorial(d.a, r) * rising_factorial(d.eta, r) / denom)
    raw = [sum(_stirling2(r, j) * fact[j] for j in range(0, r + 1)) if r else 1.0
           for r in range(order + 1)]
    return float(sum(math.comb(order, j) * d.shift ** (order - j) * raw[j]
                     for j in range(order + 1)))


_HUGE_RATE = 1e15


def waring_sampler(d: GeneralizedWaring, rng: np.random.Generator, size=None):
    """Draw via ``p ~ Beta(rho, a)`` then ``N | p ~ NB(eta, p)`` counting failures."""
    p = rng.beta(d.rho, d.a, size=size)
    p = np.maximum(p, np.finfo(float).tiny)
    rate = rng.gamma(d.eta, (1.0 - p) / p)
    # Poisson spread is negligible relative to the mean at these rates
    big = rate > _HUGE_RATE
    counts = rng.poisson(np.where(big, 0.0, rate))
    counts = np.where(big, np.floor(np.minimum(rate, 9e18)), counts).astype(np.int64)
    out = counts + d.shift
    return int(out) if size is None else out


def _float_params(model: GnedinFisherPsi) -> tuple[float, float]:
    return float(model.gamma), float(model.psi)


def xi_prior(model: GnedinFisherPsi) -> GeneralizedWaring:
    """Mixing law of ``Xi``: Waring with ``a = 1-gamma+psi``, ``eta = 1-psi``, ``rho = gamma``, shift 1."""
    g, p = _float_params(model)
    return GeneralizedWaring(1 - g + p, 1 - p, g, shift=1)


def xi_prior_log_pmf(model: GnedinFisherPsi, xi):
    """Vectorized log of the mixing law, evaluated from its gamma-ratio form."""
    g, p = _float_params(model)
    xi = np.asarray(xi, dtype=float)
    log_const = (gammaln(g + 1 - p) - gammaln(g) + gammaln(1 + p)
                 - gammaln(1 - p) - gammaln(1 - g + p))
    with np.errstate(invalid="ignore"):
        xx = np.where(xi >= 1, xi, 1.0)
        out = (log_const + gammaln(xx - p) + gammaln(xx - g + p)
               - gammaln(xx) - gammaln(xx + 1))
    out = np.where(xi >= 1, out, -np.inf)
    return float(out) if out.ndim == 0 else out


def xi_prior_pmf(model: GnedinFisherPsi, xi: int) -> float:
    """``(1-psi)_{xi-1} (1-gamma+psi)_{xi-1} (gamma)_{1-psi} / (Gamma(xi) (1+psi)_{xi-psi})``."""
    if xi < 1:
        raise DomainError(f"xi must be >= 1, got {xi}")
    g, p = _float_params(model)
    log = (rising_factorial_real_exponent(1 - p, xi - 1)
           * rising_factorial_real_exponent(1 - g + p, xi - 1)
           * rising_factorial_real_exponent(g, 1 - p)
           / rising_factorial_real_exponent(1 + p, xi - p))
    return math.exp(log.log_magnitude - math.lgamma(xi))


def xi_prior_pmf_one_parameter(gamma, xi: int):
    """``gamma (1-gamma)_{xi-1} / xi!``; exact for rational ``gamma``."""
    if xi < 1:
        raise DomainError(f"xi must be >= 1, got {xi}")
    return gamma * rising_factorial(1 - gamma, xi - 1) / math.factorial(xi)


def xi_prior_tail_constant(model: GnedinFisherPsi) -> float:
    """``c`` in ``P(Xi = xi) ~ c xi^{-(1+gamma)}``."""
    g, p = _float_params(model)
    return math.exp(math.lgamma(1 + g - p) + math.lgamma(1 + p) - math.lgamma(1 - p)
                    - math.lgamma(1 - g + p) - math.lgamma(g))


def _envelope_factor(model: GnedinFisherPsi, xi_min: int) -> float:
    """``B`` with ``P(Xi = xi) <= B c xi^{-(1+gamma)}`` for all ``xi >= xi_min >= 2``.

    From Wendel's bounds ``x^s (x/(x+s))^{1-s} <= Gamma(x+s)/Gamma(x) <= x^s``, 0 <= s <= 1.
    """
    g, p = _float_params(model)
    m = float(xi_min)
    factor = (1.0 - 1.0 / m) ** (-p)
    t = p - g
    if t < 0:
        factor /= 1.0 + t / m
    return factor


def xi_prior_tail_bound(model: GnedinFisherPsi, xi_max: int, extra_decay: float = 0.0) -> float:
    """Upper bound on ``sum_{xi > xi_max} P(Xi = xi) xi^{-extra_decay}``."""
    if xi_max < 2:
        raise DomainError("xi_max must be >= 2")
    g, _ = _float_params(model)
    expo = g + extra_decay
    c = xi_prior_tail_constant(model)
    return c * _envelope_factor(model, xi_max + 1) * float(xi_max) ** (-expo) / expo


def xi_posterior(model: GnedinFisherPsi, n: int, k: int) -> GeneralizedWaring:
    """Posterior of ``Xi`` given ``K_n = k``: Waring(k-gamma+psi, k-psi, n+gamma-k) shifted by ``k``."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    g, p = _float_params(model)
    if k - g + p <= 0:
        raise DomainError(f"posterior undefined: k - gamma + psi = {k - g + p} <= 0")
    return GeneralizedWaring(k - g + p, k - p, n + g - k, shift=k)


def xi_posterior_pmf(model: GnedinFisherPsi, n: int, k: int, xi: int) -> float:
    """Closed-form posterior mass; zero for ``xi < k``.

    ``(n+gamma-k)_{k-psi} (k-psi)_{j} (k-gamma+psi)_{j} / (j! (n+psi)_{k-psi+j})``
    with ``j = xi - k`` unseen species.
    """
    xi_posterior(model, n, k)  # domain checks
    if xi < k:
        return 0.0
    g, p = _float_params(model)
    j = xi - k
    log = (rising_factorial_real_exponent(n + g - k, k - p)
           * rising_factorial_real_exponent(k - p, j)
           * rising_factorial_real_exponent(k - g + p, j)
           / rising_factorial_real_exponent(n + p, k - p + j))
    return math.exp(log.log_magnitude - math.lgamma(j + 1))


def unseen_species_pmf_one_parameter(gamma: float, n: int, k: int, j: int) -> float:
    """One-parameter law of the number ``j = Xi - k`` of unseen species.

    ``(n-1)!/(k-1)! Gamma(gamma+n)/Gamma(gamma+n-k) (k-gamma)_j Gamma(k+j) / (Gamma(j+1) Gamma(k+j+n))``.
    """
    if not 1 <= k <= n or j < 0:
        raise DomainError("need 1 <= k <= n and j >= 0")
    g = float(gamma)
    log = (math.lgamma(n) - math.lgamma(k) + math.lgamma(g + n) - math.lgamma(g + n - k)
           + rising_factorial_real_exponent(k - g, j).log_magnitude
           + math.lgamma(k + j) - math.lgamma(j + 1) - math.lgamma(k + j + n))
    return math.exp(log)


def blocks_pmf_two_param(model: GnedinFisherPsi, n: int) -> list:
    """``P(K_n = k) = C(n-1, k-1) n!/k! V_{n,k}`` for ``k = 1..n`` (exact for exact models)."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    g, p = model.gamma, model.psi
    den = rising_factorial(1 + p, n - 1) * rising_factorial(1 + g - p, n - 1)
    out = []
    for k in range(1, n + 1):
        num = (math.comb(n - 1, k - 1) * math.factorial(n) // math.factorial(k)
               * rising_factorial(g, n - k) * rising_factorial(1 - p, k - 1)
               * rising_factorial(1 - g + p, k - 1))
        out.append(num / den)
    return out


def blocks_log_pmf_two_param(model: GnedinFisherPsi, n: int) -> np.ndarray:
    """Log of the ``K_n`` law in gamma-function form; usable for large ``n``."""
    g, p = _float_params(model)
    k = np.arange(1, n + 1, dtype=float)
    return (gammaln(n) - gammaln(k) - gammaln(n - k + 1) + gammaln(n + 1) - gammaln(k + 1)
            + gammaln(g + n - k) - gammaln(g)
            + gammaln(k - p) - gammaln(1 - p) + gammaln(k - g + p) - gammaln(1 - g + p)
            - gammaln(n + p) + gammaln(1 + p) - gammaln(n + g - p) + gammaln(1 + g - p))


def blocks_pmf_one_parameter(gamma, n: int) -> list:
    """``C(n, k) (1-gamma)_{k-1} (gamma)_{n-k} / (1+gamma)_{n-1}``."""
    den = rising_factorial(1 + gamma, n - 1)
    return [math.comb(n, k) * rising_factorial(1 - gamma, k - 1) * rising_factorial(gamma, n - k) / den
            for k in range(1, n + 1)]


def new_blocks_posterior(model: GnedinFisherPsi, n: int, k: int, m: int, k_star: int):
    """Probability of ``k_star`` new blocks among ``m`` further balls given ``K_n = k``."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    if not 0 <= k_star <= m:
        raise DomainError(f"need 0 <= k_star <= m, got m={m}, k_star={k_star}")
    g, p = model.gamma, model.psi
    num = (math.comb(m, k_star) * rising_factorial(g + n - k, m - k_star)
           * rising_factorial(n + k + k_star, m - k_star)
           * rising_factorial(k - p, k_star) * rising_factorial(k - g + p, k_star))
    den = rising_factorial(n + p, m) * rising_factorial(n + g - p, m)
    return num / den


def new_blocks_posterior_gibbs(model, n: int, k: int, m: int, k_star: int):
    """Generic form ``V_{n+m,k+k*} / V_{n,k} * S(m, k*; r = -(n+k))`` for any genus -1 model."""
    v = model.weight(n, k)
    if v == 0:
        raise DomainError("conditioning event has probability zero")
    return model.weight(n + m, k + k_star) / v * noncentral_lah(m, k_star, -(n + k))


def fisher_log_weight(xi, n: int, k: int):
    """Vectorized ``log V^{(xi)}_{n,k}``; ``-inf`` where ``xi < k``."""
    xi = np.asarray(xi, dtype=float)
    ok = xi >= k
    xx = np.where(ok, xi, float(k))
    out = gammaln(xx) - gammaln(xx - k + 1) + gammaln(xx + 1) - gammaln(xx + n)
    out = np.where(ok, out, -np.inf)
    return float(out) if out.ndim == 0 else out


def verify_mixture(model: GnedinFisherPsi, n: int, k: int, xi_max: int = 10**5) -> VerificationReport:
    """Compare ``sum_{xi=k}^{xi_max} P(Xi=xi) V^{(xi)}_{n,k}`` with ``V_{n,k}``."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    xi_max = max(int(xi_max), k, 2)
    xi = np.arange(k, xi_max + 1, dtype=float)
    terms = np.exp(xi_prior_log_pmf(model, xi) + fisher_log_weight(xi, n, k))
    partial = math.fsum(terms.tolist())
    target = float(weight_psi(model, n, k))
    tail = xi_prior_tail_bound(model, xi_max, extra_decay=n - k)
    diff = abs(partial - target)
    ok = diff <= tail + 1e-10
    return VerificationReport("mixture", ok, diff,
                              {"n": n, "k": k, "xi_max": xi_max, "partial_sum": partial,
                               "weight": target, "tail_bound": tail})


def verify_bayes_identity(model: GnedinFisherPsi, n: int, k: int, xi: int,
                          rel_tol: float = 1e-9) -> VerificationReport:
    """Check ``P(Xi=xi) V^{(xi)}_{n,k} = P(Xi=xi | K_n=k) V_{n,k}``."""
    v_fisher = weight_fisher(xi, n, k)
    left = xi_prior_pmf(model, xi) * float(v_fisher) if v_fisher != 0 else 0.0
    right = xi_posterior_pmf(model, n, k, xi) * float(weight_psi(model, n, k))
    if left == 0.0 or right == 0.0:
        ok = left == 0.0 and right == 0.0
        rel = 0.0 if ok else math.inf
    else:
        rel = abs(left - right) / max(abs(left), abs(right))
        ok = rel <= rel_tol
    return VerificationReport("bayes", ok, rel,
                              {"n": n, "k": k, "xi": xi, "prior_side": left, "posterior_side": right})


def blocks_prior_tv_distance(model: GnedinFisherPsi, n: int) -> float:
    """Total variation between the law of ``K_n`` and the law of ``Xi``.

    ``K_n <= n``, so the prior mass above ``n`` counts in full.
    """
    kn = np.exp(blocks_log_pmf_two_param(model, n))
    prior = np.exp(xi_prior_log_pmf(model, np.arange(1, n + 1)))
    return 0.5 * (math.fsum(np.abs(kn - prior).tolist()) + max(0.0, 1.0 - math.fsum(prior.tolist())))
