from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gnedin_fisher import (GnedinFisherPsi, GnedinFisherZeta, OccupancyCounts, blocks_pmf, eppf,
                           eppf_of_set_partition, verify_addition_rule, verify_normalization)
from gnedin_fisher.combinatorics import DomainError, SetPartition, enumerate_set_partitions


def test_occupancy_counts():
    c = OccupancyCounts((2, 1))
    assert (c.n, c.k) == (3, 2)
    assert c.add_to(1).counts == (2, 2)
    assert c.add_new().counts == (2, 1, 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_normalization_exact(exact_model, n):
    report = verify_normalization(exact_model, n)
    assert report.ok and report.residual == 0


def test_normalization_float(float_model):
    for n in (3, 6):
        assert verify_normalization(float_model, n).ok


def test_normalization_by_hand():
    # independent of verify_normalization: sum over explicit partitions
    m = GnedinFisherPsi(F(4, 5), F(3, 10))
    total = sum(eppf_of_set_partition(m, p) for p in enumerate_set_partitions(5))
    assert total == 1


def test_normalization_cap():
    with pytest.raises(DomainError):
        verify_normalization(GnedinFisherPsi(F(1, 2), 0), 10)


def test_eppf_is_symmetric():
    m = GnedinFisherPsi(F(6, 5), F(1, 2))
    assert eppf(m, (3, 1, 2)) == eppf(m, (1, 2, 3))
    assert eppf(m, SetPartition([(1, 4), (2,), (3, 5)]).sizes) == eppf(m, (2, 1, 2))


def test_eppf_small_values():
    m = GnedinFisherPsi(F(1, 2), 0)
    assert eppf(m, (1,)) == 1
    assert eppf(m, (2,)) == F(2, 3)
    assert eppf(m, (1, 1)) == F(1, 3)


def test_eppf_case_ii_zero():
    m = GnedinFisherZeta(3, 2)
    assert eppf(m, (1, 1)) == 0
    assert eppf(m, (4,)) == 1


counts_strategy = st.lists(st.integers(1, 4), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(counts_strategy, st.sampled_from([(F(1, 2), F(0)), (F(4, 5), F(3, 10)), (F(6, 5), F(1, 2))]))
def test_addition_rule_property(counts, gp):
    assert verify_addition_rule(GnedinFisherPsi(*gp), tuple(counts)).ok


def test_addition_rule_zeta_case_ii():
    m = GnedinFisherZeta(5, 6)
    for counts in [(1,), (2, 1), (1, 1), (3, 2)]:
        assert verify_addition_rule(m, counts).ok


@pytest.mark.parametrize("n", [1, 4, 7])
def test_blocks_pmf_is_partition_count(exact_model, n):
    # P(K_n = k) equals the EPPF summed over partitions with k blocks
    direct = [0] * n
    for p in enumerate_set_partitions(n):
        direct[p.k - 1] += eppf_of_set_partition(exact_model, p)
    assert blocks_pmf(exact_model, n) == direct


def test_report_serializes():
    d = verify_normalization(GnedinFisherPsi(F(1, 2), 0), 3).to_dict()
    assert d["check"] == "normalization" and d["ok"] is True and d["residual"] == "0"
