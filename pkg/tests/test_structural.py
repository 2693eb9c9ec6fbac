import math

import mpmath
import numpy as np
import pytest
from scipy import stats

from gnedin_fisher import (GnedinFisherPsi, structural_atom, structural_density,
                           structural_mixture_pdf_check, structural_sampler, xi_prior_pmf)
from gnedin_fisher.allocation import replicate_rng
from gnedin_fisher.combinatorics import DomainError
from gnedin_fisher.structural import (evaluate_density, structural_cdf_one_parameter,
                                      structural_density_without_y, structural_law, structural_mass)

GRID = [i / 10 for i in range(1, 10)]


@pytest.mark.parametrize("g", [0.25, 0.5, 0.75, 0.3, 0.8])
def test_one_parameter_density(g):
    m = GnedinFisherPsi(g, 0.0)
    for y in GRID:
        assert structural_density(m, y) == pytest.approx(g * (1 - g) * y ** (g - 1), abs=1e-9, rel=1e-9)


def test_one_parameter_example():
    m = GnedinFisherPsi(0.5, 0.0)
    assert structural_density(m, 0.25) == pytest.approx(0.25 ** -0.5 / 4, rel=1e-12)
    assert structural_atom(m) == pytest.approx(0.5, rel=1e-14)


def test_density_without_factor_y_fails():
    # dropping the factor y breaks the one-parameter closed form and the total mass
    from scipy import integrate
    g, y = 0.5, 0.3
    m = GnedinFisherPsi(g, 0.0)
    assert structural_density_without_y(m, y) != pytest.approx(g * (1 - g) * y ** (g - 1), rel=1e-3)
    m = GnedinFisherPsi(0.8, 0.3)
    part, _ = integrate.quad(lambda t: structural_density_without_y(m, t), 0.05, 0.95)
    assert structural_atom(m) + part > 1.01


@pytest.mark.parametrize("g,p", [(0.8, 0.3), (1.2, 0.6), (0.3, 0.6), (1.2, 0.3)])
def test_density_against_mpmath(g, p):
    m = GnedinFisherPsi(g, p)
    a = math.gamma(g + 1 - p) * math.gamma(1 + p) / math.gamma(g)
    for y in (0.001, 0.05, 0.5, 0.97):
        ref = a * (1 - p) * (1 - g + p) * y * mpmath.hyp2f1(2 - p, 2 - g + p, 2, 1 - y)
        assert structural_density(m, y) == pytest.approx(float(ref), rel=1e-10)


def test_euler_branch_agrees_with_series():
    m = GnedinFisherPsi(0.8, 0.3)
    series = evaluate_density(m, 0.2)
    euler = evaluate_density(m, 0.2, method="euler")
    assert series.method == "series" and euler.method == "euler"
    assert euler.value == pytest.approx(series.value, rel=1e-10)
    # the term cap triggers the fallback automatically
    assert evaluate_density(m, 1e-4, max_terms=10_000).method == "euler"


def test_density_domain():
    m = GnedinFisherPsi(0.8, 0.3)
    for y in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            structural_density(m, y)


def test_atom_is_prior_mass_at_one(float_model):
    assert structural_atom(float_model) == pytest.approx(xi_prior_pmf(float_model, 1), abs=1e-12)


def test_total_mass(float_model):
    mass, err = structural_mass(float_model)
    assert abs(mass - 1) <= 1e-6
    assert err < 1e-6


@pytest.mark.parametrize("y", [1e-3, 0.1, 0.5, 0.9])
def test_mixture_partial_sums(y):
    for g, p in [(0.8, 0.3), (1.2, 0.6), (0.3, 0.0)]:
        r = structural_mixture_pdf_check(GnedinFisherPsi(g, p), y, xi_max=10**4)
        assert r.ok, r


def test_law_object():
    law = structural_law(GnedinFisherPsi(0.8, 0.3))
    assert law.atom_mass == pytest.approx(structural_atom(GnedinFisherPsi(0.8, 0.3)))
    assert law.density(0.4) == pytest.approx(structural_density(GnedinFisherPsi(0.8, 0.3), 0.4))


def test_one_parameter_cdf():
    assert structural_cdf_one_parameter(0.5, 1.0) == 1.0
    assert structural_cdf_one_parameter(0.5, 0.25) == pytest.approx(0.25)
    assert structural_cdf_one_parameter(0.5, 0.0) == 0.0


def test_sampler_one_parameter():
    g = 0.5
    m = GnedinFisherPsi(g, 0.0)
    ys = structural_sampler(m, np.random.default_rng(4), size=20_000)
    atom = ys == 1.0
    # atom mass gamma, continuous part has CDF y^gamma
    assert stats.binomtest(int(atom.sum()), ys.size, g).pvalue > 0.001
    assert stats.kstest(ys[~atom], lambda y: y ** g).pvalue > 0.001


def test_sampler_deterministic():
    m = GnedinFisherPsi(0.8, 0.3)
    assert structural_sampler(m, replicate_rng(2, 1)) == structural_sampler(m, replicate_rng(2, 1))
