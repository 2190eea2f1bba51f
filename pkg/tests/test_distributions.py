from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyckmining.distributions import (
    WITHHOLDING,
    MinerParams,
    Strategy,
    cycle_length_pmf,
    expected_cycle_length,
    tail_mass_bound,
    tail_mean_bound,
)
from dyckmining.errors import DomainError, UnsupportedStrategyError

THIRD = MinerParams(Fraction(1, 3))


def test_params_validation():
    for q in (0, 0.5, -0.1, 0.7):
        with pytest.raises(DomainError):
            MinerParams(q)
    for g in (-0.01, 1.01):
        with pytest.raises(DomainError):
            MinerParams(0.2, g)
    p = MinerParams(Fraction(1, 3))
    assert p.p + p.q == 1


def test_exact_converts_floats():
    e = MinerParams(0.25, 0.5).exact()
    assert e.q == Fraction(1, 4) and e.gamma == Fraction(1, 2)


@pytest.mark.parametrize("name,member", [("sm", Strategy.SM), ("eth-old", Strategy.ETH_SM_OLD_DA),
                                         ("ETH_SM_NEW_DA", Strategy.ETH_SM_NEW_DA), ("HM", Strategy.HONEST)])
def test_strategy_parse(name, member):
    assert Strategy.parse(name) is member


def test_strategy_parse_rejects():
    with pytest.raises(DomainError):
        Strategy.parse("fork")


def test_pmf_examples():
    assert cycle_length_pmf(Strategy.SM, THIRD, 1) == Fraction(2, 3)
    assert cycle_length_pmf(Strategy.SM, THIRD, 3) == Fraction(4, 243)
    assert cycle_length_pmf(Strategy.EFSM, THIRD, 2) == Fraction(4, 27)
    assert cycle_length_pmf(Strategy.LSM, THIRD, 2) == Fraction(2, 9)


def test_eth_strategies_share_sm_law():
    for n in range(1, 8):
        assert cycle_length_pmf(Strategy.ETH_SM_OLD_DA, THIRD, n) == cycle_length_pmf(Strategy.SM, THIRD, n)
    assert expected_cycle_length(Strategy.ETH_SM_NEW_DA, THIRD) == Fraction(13, 9)


def test_pmf_honest_unsupported():
    with pytest.raises(UnsupportedStrategyError):
        cycle_length_pmf(Strategy.HONEST, THIRD, 1)
    with pytest.raises(DomainError):
        cycle_length_pmf(Strategy.SM, THIRD, 0)


def test_sm_length_two_decomposes_into_three_words():
    for q in (Fraction(1, 10), Fraction(1, 3), Fraction(9, 20)):
        p = 1 - q
        assert cycle_length_pmf(Strategy.SM, MinerParams(q), 2) == 2 * p * q**2 + p**2 * q


@pytest.mark.parametrize("s,expected", [(Strategy.SM, Fraction(13, 9)), (Strategy.EFSM, 2),
                                        (Strategy.LSM, Fraction(5, 3)), (Strategy.HONEST, 1)])
def test_expected_length_examples(s, expected):
    assert expected_cycle_length(s, THIRD) == expected


@pytest.mark.parametrize("s", WITHHOLDING)
def test_normalisation_with_tail_bound(s):
    for k in range(1, 10):
        params = MinerParams(Fraction(k, 20))
        partial = sum(cycle_length_pmf(s, params, n) for n in range(1, 61))
        bound = tail_mass_bound(s, params, 60)
        assert partial <= 1
        assert 1 - partial <= bound


@pytest.mark.parametrize("s", WITHHOLDING)
def test_mean_consistency(s):
    for k in range(1, 10):
        params = MinerParams(k / 20)
        partial = sum(n * cycle_length_pmf(s, params, n) for n in range(1, 201))
        gap = expected_cycle_length(s, params) - partial
        assert -1e-12 <= gap <= tail_mean_bound(s, params, 200) + 1e-12


@pytest.mark.parametrize("s,q,N", [(Strategy.SM, Fraction(9, 20), 40), (Strategy.EFSM, Fraction(3, 10), 30),
                                   (Strategy.LSM, Fraction(2, 5), 25)])
def test_tail_bound_dominates_exact_tail(s, q, N):
    params = MinerParams(q)
    exact = 1 - sum(cycle_length_pmf(s, params, n) for n in range(1, N + 1))
    assert tail_mass_bound(s, params, N) >= exact


def test_tail_bounds_decrease_and_vanish():
    for s in WITHHOLDING:
        vals = [tail_mass_bound(s, THIRD, n) for n in range(3, 400, 20)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert float(tail_mass_bound(s, THIRD, 2000)) < 1e-90


def test_tail_bound_needs_n3():
    with pytest.raises(DomainError):
        tail_mass_bound(Strategy.SM, THIRD, 2)
    with pytest.raises(DomainError):
        tail_mean_bound(Strategy.SM, THIRD, 2)


@given(st.sampled_from(WITHHOLDING), st.fractions(min_value=Fraction(1, 100), max_value=Fraction(49, 100)),
       st.fractions(min_value=0, max_value=1), st.integers(min_value=1, max_value=25))
def test_pmf_independent_of_gamma(s, q, g, n):
    assert cycle_length_pmf(s, MinerParams(q, g), n) == cycle_length_pmf(s, MinerParams(q), n)
