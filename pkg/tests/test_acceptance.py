"""Acceptance suite: one check per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""
import math
import time
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import stats

from gnedin_fisher import (GnedinFisherPsi, blocks_pmf, eppf, new_blocks_posterior, one_step_rules,
                           psi_to_zeta, sample_sequential, sample_two_stage, structural_atom,
                           structural_density, structural_sampler, verify_bayes_identity,
                           verify_mixture, verify_multistep_paths, verify_multistep_total,
                           verify_normalization, xi_prior_pmf, xi_prior_tail_constant)
from gnedin_fisher.combinatorics import SetPartition, enumerate_set_partitions, integer_partitions
from gnedin_fisher.laws import blocks_prior_tv_distance
from gnedin_fisher.structural import structural_mass

GRID = [(F(1, 2), F(0)), (F(4, 5), F(3, 10)), (F(6, 5), F(1, 2))]
FLOAT_GRID = [(g, p) for g in (0.3, 0.8, 1.2) for p in (0.0, 0.3, 0.6) if g < p + 1]

RESULTS: dict[int, tuple[bool, str]] = {}
TITLES = {
    1: "exact normalization over set partitions",
    2: "(gamma, psi) and (gamma, zeta) weights agree; psi <-> gamma - psi symmetry",
    3: "psi = 0 reduces to the one-parameter EPPF and K_n law",
    4: "Gibbs backward recursion",
    5: "mixture of Fisher models within the analytic tail bound",
    6: "Bayes identity for the Xi posterior",
    7: "posterior of new blocks: normalization and m = 1",
    8: "multistep rules: total probability and path oracle",
    9: "prior tail law at xi = 1e6",
    10: "structural law: psi = 0 density, total mass, atom",
    11: "sampler fidelity (chi-square and KS)",
    12: "K_n law approaches the Xi prior (TV at n = 2000)",
}


def record(number, ok, detail):
    RESULTS[number] = (bool(ok), detail)
    assert ok, f"criterion {number} failed: {detail}"


def rf(x, m):
    out = F(1) if isinstance(x, F) else 1.0
    for i in range(m):
        out *= x + i
    return out


def criterion_1():
    start = time.perf_counter()
    residuals = [verify_normalization(GnedinFisherPsi(g, p), n).residual for g, p in GRID for n in range(1, 8)]
    elapsed = time.perf_counter() - start
    ok = all(r == 0 for r in residuals) and elapsed < 10
    return ok, f"21 cases, max |residual| = {max(abs(r) for r in residuals)}, {elapsed:.2f}s"


def criterion_2():
    bad = 0
    for g, p in GRID:
        mp, ms = GnedinFisherPsi(g, p), GnedinFisherPsi(g, g - p)
        mz = psi_to_zeta(mp)
        for n in range(1, 16):
            for k in range(1, n + 1):
                w = mp.weight(n, k)
                bad += (w != mz.weight(n, k)) + (w != ms.weight(n, k))
    return bad == 0, f"{bad} mismatches over 3 x 120 (n, k) pairs"


def criterion_3():
    bad = 0
    for g in (F(1, 4), F(1, 2), F(3, 4)):
        model = GnedinFisherPsi(g, 0)
        for n in range(1, 13):
            for counts in integer_partitions(n):
                k = len(counts)
                closed = (F(math.factorial(k - 1), math.factorial(n - 1)) * rf(1 - g, k - 1) * rf(g, n - k)
                          / rf(1 + g, n - 1) * math.prod(math.factorial(c) for c in counts))
                bad += eppf(model, counts) != closed
            law = [math.comb(n, k) * rf(1 - g, k - 1) * rf(g, n - k) / rf(1 + g, n - 1) for k in range(1, n + 1)]
            bad += blocks_pmf(model, n) != law
    return bad == 0, f"{bad} mismatches, gamma in {{1/4, 1/2, 3/4}}, n <= 12"


def criterion_4():
    bad = 0
    for g, p in GRID:
        for model in (GnedinFisherPsi(g, p), psi_to_zeta(GnedinFisherPsi(g, p))):
            for n in range(1, 16):
                for k in range(1, n + 1):
                    bad += model.weight(n, k) != (n + k) * model.weight(n + 1, k) + model.weight(n + 1, k + 1)
    return bad == 0, f"{bad} failures, n <= 15, both parametrizations"


def criterion_5():
    worst = 0.0
    fails = 0
    models = [GnedinFisherPsi(float(g), float(p)) for g, p in GRID] + [GnedinFisherPsi(g, p) for g, p in FLOAT_GRID]
    for m in models:
        for n in range(1, 7):
            for k in range(1, n + 1):
                r = verify_mixture(m, n, k, 10**5)
                fails += not r.ok
                worst = max(worst, r.residual - r.details["tail_bound"])
    return fails == 0, f"{fails} failures, max(diff - tail bound) = {worst:.2e}"


def criterion_6():
    worst = 0.0
    fails = 0
    models = [GnedinFisherPsi(float(g), float(p)) for g, p in GRID] + [GnedinFisherPsi(g, p) for g, p in FLOAT_GRID]
    for m in models:
        for n in range(1, 7):
            for k in range(1, n + 1):
                for xi in range(1, 51):
                    r = verify_bayes_identity(m, n, k, xi, rel_tol=1e-9)
                    zero_ok = xi >= k or (r.details["prior_side"] == 0.0 and r.details["posterior_side"] == 0.0)
                    fails += not (r.ok and zero_ok)
                    worst = max(worst, r.residual)
    return fails == 0, f"{fails} failures, max relative error {worst:.1e}"


def criterion_7():
    bad = 0
    for g, p in GRID:
        m = GnedinFisherPsi(g, p)
        for n in range(1, 9):
            for k in range(1, n + 1):
                for mm in range(1, 9):
                    bad += sum(new_blocks_posterior(m, n, k, mm, ks) for ks in range(mm + 1)) != 1
            for counts in integer_partitions(n):
                rules = one_step_rules(m, counts)
                bad += new_blocks_posterior(m, n, len(counts), 1, 1) != rules.p_new
    return bad == 0, f"{bad} failures, n, m <= 8"


def criterion_8():
    fails = 0
    checks = 0
    for g, p in GRID:
        m = GnedinFisherPsi(g, p)
        for n in range(1, 6):
            for state in integer_partitions(n):
                for mm in range(1, 5):
                    fails += not verify_multistep_total(m, state, mm).ok
                    fails += not verify_multistep_paths(m, state, mm).ok
                    checks += 2
    return fails == 0, f"{fails} failures in {checks} exact checks (mixed rule uses prod s_j!)"


def criterion_9():
    start = time.perf_counter()
    m = GnedinFisherPsi(0.8, 0.3)
    ratio = xi_prior_pmf(m, 10**6) * float(10**6) ** 1.8 / xi_prior_tail_constant(m)
    elapsed = time.perf_counter() - start
    return 0.99 <= ratio <= 1.01 and elapsed < 1, f"ratio = {ratio:.6f}, {elapsed * 1e3:.1f} ms"


def criterion_10():
    worst_density = 0.0
    for g in (0.25, 0.5, 0.75):
        m = GnedinFisherPsi(g, 0.0)
        for i in range(1, 10):
            y = i / 10
            worst_density = max(worst_density, abs(structural_density(m, y) - g * (1 - g) * y ** (g - 1)))
    worst_mass = 0.0
    worst_atom = 0.0
    for g, p in FLOAT_GRID:
        m = GnedinFisherPsi(g, p)
        worst_mass = max(worst_mass, abs(structural_mass(m)[0] - 1))
        worst_atom = max(worst_atom, abs(structural_atom(m) - xi_prior_pmf(m, 1)))
    ok = worst_density <= 1e-9 and worst_mass <= 1e-6 and worst_atom <= 1e-12
    return ok, f"density err {worst_density:.1e}, mass err {worst_mass:.1e}, atom err {worst_atom:.1e}"


def _restrict(part, n):
    return SetPartition([b for b in (tuple(x for x in block if x <= n) for block in part.blocks) if b])


def _chi_square(observed: Counter, expected: dict, draws: int):
    keys = [key for key in expected if expected[key] > 0]
    if any(observed[key] for key in expected if expected[key] == 0):
        return 0.0
    obs = np.array([observed[key] for key in keys], dtype=float)
    exp = np.array([float(expected[key]) for key in keys]) * draws
    return stats.chisquare(obs, exp).pvalue


def criterion_11():
    start = time.perf_counter()
    draws = 100_000
    model = GnedinFisherPsi(0.8, 0.3)
    exact4 = {p: eppf(GnedinFisherPsi(F(4, 5), F(3, 10)), p.sizes) for p in enumerate_set_partitions(4)}
    exact6 = dict(enumerate(blocks_pmf(GnedinFisherPsi(F(4, 5), F(3, 10)), 6), start=1))
    pvalues = {}
    for name, sampler, seed in (("sequential", sample_sequential, 101), ("two-stage", sample_two_stage, 202)):
        rng = np.random.default_rng(seed)
        parts = [sampler(model, 6, rng) for _ in range(draws)]
        # both constructions are consistent: balls 1..4 of a 6-ball draw form a 4-ball draw
        pvalues[f"{name} EPPF(4)"] = _chi_square(Counter(_restrict(p, 4) for p in parts), exact4, draws)
        pvalues[f"{name} K_6"] = _chi_square(Counter(p.k for p in parts), exact6, draws)
    g = 0.5
    ys = structural_sampler(GnedinFisherPsi(g, 0.0), np.random.default_rng(303), size=draws)
    atom = ys == 1.0
    # atom weight gamma, continuous part (1-gamma) y^gamma, i.e. conditional CDF y^gamma
    pvalues["structural atom"] = stats.binomtest(int(atom.sum()), draws, g).pvalue
    pvalues["structural KS"] = stats.kstest(ys[~atom], lambda y: y ** g).pvalue
    elapsed = time.perf_counter() - start
    ok = all(pv > 0.001 for pv in pvalues.values()) and elapsed < 60
    detail = ", ".join(f"{k} p={v:.3f}" for k, v in pvalues.items())
    return ok, f"{detail}; {elapsed:.1f}s"


def criterion_12():
    tv = blocks_prior_tv_distance(GnedinFisherPsi(0.8, 0.3), 2000)
    return tv < 0.01, f"TV = {tv:.2e}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}


@pytest.mark.parametrize("number", list(CRITERIA))
def test_criterion(number):
    ok, detail = CRITERIA[number]()
    record(number, ok, detail)


def format_line(number):
    ok, detail = RESULTS[number]
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {TITLES[number]} ({detail})"


if __name__ == "__main__":
    for i, fn in CRITERIA.items():
        ok, detail = fn()
        RESULTS[i] = (bool(ok), detail)
        print(format_line(i), flush=True)
