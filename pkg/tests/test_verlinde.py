import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qmcg import verlinde
from qmcg.errors import DomainError, PrecisionError
from qmcg.verlinde import GenusLevel, traceless_dim, twisted_dim, untwisted_dim


def test_twisted_spot_values():
    assert twisted_dim(GenusLevel(2, 1)) == 6
    assert twisted_dim(2, 2) == 19
    assert twisted_dim(3, 1) == 28


def test_twisted_g2_k2_by_hand():
    # sin^-2 at j = 1..5 over 6: 4, 4/3, 1, 4/3, 4 with alternating signs
    terms = [Fraction(4), Fraction(-4, 3), Fraction(1), Fraction(-4, 3), Fraction(4)]
    assert 3 * sum(terms) == twisted_dim(2, 2)


def test_twisted_needs_genus_two():
    with pytest.raises(DomainError):
        twisted_dim(1, 3)


@pytest.mark.parametrize("g,k", [(0, 1), (2, 0), (-1, 4)])
def test_bad_genus_level(g, k):
    with pytest.raises(DomainError):
        GenusLevel(g, k)


def test_untwisted_examples():
    for k in range(1, 10):
        assert untwisted_dim(1, k) == k + 1
    assert untwisted_dim(2, 1) == 4
    assert untwisted_dim(2, 1, boundary_label=1) == 0


def _brute_theta_graph(k, lam=None):
    # independent count: theta graph, leg on z when lam is given
    def adm(a, b, c):
        return (a + b + c) % 2 == 0 and abs(a - b) <= c <= a + b and a + b + c <= 2 * k

    labels = range(k + 1)
    if lam is None:
        return sum(adm(x, y, z) for x, y, z in itertools.product(labels, repeat=3))
    return sum(
        adm(x, y, z) and adm(x, y, w) and adm(z, w, lam) for x, y, z, w in itertools.product(labels, repeat=4)
    )


@pytest.mark.parametrize("k", range(1, 7))
def test_untwisted_matches_brute_force(k):
    assert untwisted_dim(2, k) == _brute_theta_graph(k)
    for lam in range(k + 1):
        assert untwisted_dim(2, k, boundary_label=lam) == _brute_theta_graph(k, lam)


def test_odd_label_vanishes():
    for k in range(1, 12):
        for lam in range(1, k + 1, 2):
            assert untwisted_dim(3, k, boundary_label=lam) == 0


def test_label_out_of_range():
    with pytest.raises(DomainError):
        untwisted_dim(2, 3, boundary_label=4)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 40))
def test_twisted_positive_integer(g, k):
    d = twisted_dim(g, k)
    assert isinstance(d, int) and d > 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 40))
def test_untwisted_nonnegative_integer(g, k):
    d = untwisted_dim(g, k)
    assert isinstance(d, int) and d > 0


def test_traceless_dim():
    assert traceless_dim(2, 1) == 35
    assert traceless_dim(3, 1) == 28**2 - 1


def test_escalation_recovers(monkeypatch):
    monkeypatch.setattr(verlinde, "_twisted_float", lambda g, k: 6.01)
    assert twisted_dim(2, 1) == 6


def test_escalation_failure_raises(monkeypatch):
    monkeypatch.setattr(verlinde, "_twisted_float", lambda g, k: 6.01)
    monkeypatch.setattr(verlinde, "_twisted_mp", lambda g, k: verlinde.mpmath.mpf("6.01"))
    with pytest.raises(PrecisionError) as info:
        twisted_dim(2, 1)
    assert info.value.gap == pytest.approx(0.01)


def test_huge_values_use_extended_precision():
    # beyond 2^52 the double sum cannot certify integrality
    d = twisted_dim(6, 40)
    assert d > 2**52
    assert d == twisted_dim(6, 40, extended=True)
    # independent high-precision evaluation
    mp = verlinde.mpmath
    with mp.workdps(80):
        ref = 41**5 * mp.fsum((-1) ** (j + 1) * mp.sin(mp.pi * j / 82) ** (-10) for j in range(1, 82))
        assert d == int(mp.nint(ref))
