import math
from fractions import Fraction

import pytest
import functools

from hypothesis import given
from hypothesis import strategies as st

from dyckmining.combinatorics import (
    ENUMERATION_CAP,
    brute_force_dyck_words,
    catalan_gf,
    catalan_number,
    enumerate_dyck_words,
    is_dyck_word,
)
from dyckmining.errors import CapExceededError, DomainError


@pytest.mark.parametrize("n,expected", [(0, 1), (1, 1), (2, 2), (3, 5), (10, 16796)])
def test_catalan_known_values(n, expected):
    assert catalan_number(n) == expected


def test_catalan_factorial_and_convolution():
    for n in range(31):
        assert catalan_number(n) == math.factorial(2 * n) // (math.factorial(n) * math.factorial(n + 1))
        assert catalan_number(n + 1) == sum(catalan_number(i) * catalan_number(n - i) for i in range(n + 1))


def test_catalan_big_values_are_exact_ints():
    c = catalan_number(500)
    assert isinstance(c, int)
    assert c == math.comb(1000, 500) // 501


def test_catalan_rejects_negative():
    with pytest.raises(DomainError):
        catalan_number(-1)


def test_catalan_10_matches_brute_force_count():
    assert len(brute_force_dyck_words(10)) == 16796


@pytest.mark.parametrize("x,expected", [(0, 1), (Fraction(2, 9), Fraction(3, 2)), (Fraction(1, 4), 2)])
def test_gf_exact_points(x, expected):
    assert catalan_gf(x) == expected


def test_gf_exact_types():
    assert isinstance(catalan_gf(Fraction(2, 9)), Fraction)
    assert isinstance(catalan_gf(0.1), float)


@pytest.mark.parametrize("x", [-1e-12, 0.2500001, Fraction(1, 3)])
def test_gf_domain(x):
    with pytest.raises(DomainError):
        catalan_gf(x)


def test_gf_functional_identity_on_grid():
    for i in range(26):
        x = i / 100
        c = catalan_gf(x)
        assert abs(c - (1 + x * c * c)) <= 1e-12 * c


def test_gf_truncated_series():
    for i in range(25):
        x = i / 100
        partial = sum(catalan_number(n) * x**n for n in range(61))
        tail = sum((4 * x) ** n for n in range(61, 2000))
        assert abs(partial - catalan_gf(x)) <= tail + 1e-15


def test_gf_two_ninths_series_cross_check():
    partial = sum(catalan_number(n) * Fraction(2, 9) ** n for n in range(60))
    assert abs(float(partial) - 1.5) < 1e-3


@pytest.mark.parametrize("w,ok", [("SHSH", True), ("SHHS", False), ("SSHH", True), ("", True),
                                  ("S", False), ("H", False), ("SXHH", False)])
def test_is_dyck_word(w, ok):
    assert is_dyck_word(w) is ok


def test_enumerate_small():
    assert enumerate_dyck_words(0) == {""}
    assert enumerate_dyck_words(2) == {"SSHH", "SHSH"}
    assert len(enumerate_dyck_words(3)) == 5


def test_enumeration_matches_brute_force():
    for n in range(8):
        assert enumerate_dyck_words(n) == brute_force_dyck_words(n)


def test_enumeration_counts_up_to_12():
    for n in range(13):
        words = enumerate_dyck_words(n)
        assert len(words) == catalan_number(n)


def test_enumeration_cap():
    with pytest.raises(CapExceededError):
        enumerate_dyck_words(ENUMERATION_CAP + 1)
    with pytest.raises(DomainError):
        enumerate_dyck_words(-1)


_cached_words = functools.lru_cache(maxsize=None)(enumerate_dyck_words)


@given(st.text(alphabet="SH", max_size=20))
def test_dyck_membership_agrees_with_enumeration(w):
    if len(w) % 2:
        assert not is_dyck_word(w)
    else:
        assert is_dyck_word(w) == (w in _cached_words(len(w) // 2))
