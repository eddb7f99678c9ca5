import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmcg import su2_tqft as tq
from qmcg.errors import DomainError
from qmcg.verlinde import untwisted_dim


def test_root_data():
    rd = tq.root_data(1)
    assert rd.A == pytest.approx(np.exp(2j * np.pi / 12))
    assert rd.mu[0] == 1
    assert tq.root_data(2).qint[2] == pytest.approx(np.sqrt(2), abs=1e-12)
    for k in range(1, 8):
        rd = tq.root_data(k)
        assert abs(abs(rd.A) - 1) < 1e-15 and rd.qint[1] == pytest.approx(1)
        assert np.allclose(np.abs(rd.mu), 1)
    with pytest.raises(DomainError):
        tq.root_data(0)


@settings(max_examples=40)
@given(st.integers(1, 12), st.integers(0, 28))
def test_quantum_integer_sine_form(k, n):
    n = min(n, 2 * k + 4)
    assert tq.root_data(k).qint[n] == pytest.approx(np.sin(np.pi * n / (k + 2)) / np.sin(np.pi / (k + 2)), abs=1e-12)


def test_colorings_examples():
    assert len(tq.admissible_colorings(1, 3)) == 4
    assert set(tq.admissible_colorings(2, 1).colorings) == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}
    assert len(tq.admissible_colorings(2, 1, boundary_label=1)) == 0
    with pytest.raises(DomainError):
        tq.admissible_colorings(4, 2)


def _brute_genus3(k):
    def adm(a, b, c):
        return tq.admissible(a, b, c, k)

    r = range(k + 1)
    return sum(
        adm(l1, l1, e1) and adm(e1, u, v) and adm(e2, u, v) and adm(l3, l3, e2)
        for l1, e1, u, v, e2, l3 in itertools.product(r, repeat=6)
    )


@pytest.mark.parametrize("k", range(1, 6))
def test_genus3_count_brute_force(k):
    assert len(tq.admissible_colorings(3, k)) == _brute_genus3(k)


@pytest.mark.parametrize("g", [1, 2, 3])
@pytest.mark.parametrize("k", range(1, 9))
def test_counts_match_verlinde(g, k):
    assert len(tq.admissible_colorings(g, k)) == untwisted_dim(g, k)
    for lam in (1, 2):
        if lam <= k:
            assert len(tq.admissible_colorings(g, k, lam)) == untwisted_dim(g, k, boundary_label=lam)


def test_net_values_basics():
    nv = tq.net_values(3)
    assert nv.theta(0, 0, 0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        nv.theta(1, 0, 0)
    # theta(a, a, 0) is the loop value
    for a in range(4):
        assert nv.theta(a, a, 0) == pytest.approx(nv.delta(a))


def test_sixj_orthogonality_k3():
    k = 3
    nv = tq.net_values(k)
    worst = 0.0
    for a, b, c, d in itertools.product(range(k + 1), repeat=4):
        I = [i for i in range(k + 1) if tq.admissible(a, d, i, k) and tq.admissible(b, c, i, k)]
        J = [j for j in range(k + 1) if tq.admissible(a, b, j, k) and tq.admissible(c, d, j, k)]
        if not I:
            continue
        M = np.array([[nv.sixj(a, b, i, c, d, j) for j in J] for i in I])
        N = np.array([[nv.sixj(d, a, j, b, c, i) for i in I] for j in J])
        worst = max(worst, np.abs(M @ N - np.eye(len(I))).max())
    assert worst < 1e-10


def test_genus1_modular_data():
    S, T = tq.genus1_rep(1)
    assert S[0, 0].real == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    for k in range(1, 9):
        S, T = tq.genus1_rep(k)
        d = k + 1
        assert np.abs(S.imag).max() == 0 and np.abs(S - S.T).max() == 0
        assert np.abs(S @ S.conj().T - np.eye(d)).max() < 1e-12
        res, _ = tq.phase_fit_residual(np.linalg.matrix_power(S @ T, 3), S @ S)
        assert res < 1e-10
        # S^2 is the identity permutation (labels are self-dual)
        assert tq.phase_fit_residual(S @ S, np.eye(d))[0] < 1e-12


def test_gram_genus1():
    for k in range(1, 7):
        G = tq.gram_form(1, k)
        # theta(a, a, 0) / (Delta_a Delta_0) = 1 for every label
        assert np.abs(G - np.eye(k + 1)).max() < 1e-12


@pytest.mark.parametrize("k", range(1, 7))
def test_gram_genus2_positive(k):
    G = tq.gram_form(2, k)
    assert np.abs(G - G.conj().T).max() < 1e-12
    assert np.linalg.eigvalsh(G).min() > 0


def test_pants_twist_k1():
    reps = tq.genus2_rep(1)
    mu = tq.root_data(1).mu
    cols = tq.admissible_colorings(2, 1).colorings
    for rep, e in zip((reps[0], reps[2], reps[4]), (0, 1, 2)):
        assert np.allclose(rep.matrix, np.diag([mu[c[e]] for c in cols]))


@pytest.mark.parametrize("k", range(1, 7))
def test_genus2_relations(k):
    reps = tq.genus2_rep(k)
    G = tq.gram_form(2, k)
    for r in reps:
        assert tq.gram_unitarity_residual(r.matrix, G) < 1e-8
    for key, val in tq.chain_relation_residuals(reps).items():
        assert val < (1e-8 if key.startswith("braid") else 1e-10), key


@pytest.mark.parametrize("k", range(1, 7))
def test_twist_spectra_in_mu(k):
    mu = tq.root_data(k).mu
    for r in tq.genus2_rep(k):
        ev = np.linalg.eigvals(r.matrix)
        assert all(np.abs(mu - e).min() < 1e-10 for e in ev)


def test_genus2_rejects_large_k():
    with pytest.raises(DomainError):
        tq.genus2_rep(7)


def test_commutant_identity():
    res = tq.fixed_and_commutant([np.eye(5)])
    assert res.commutant_dim == 25 and res.fixed_dim == 24


def test_commutant_random_irreducible():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert tq.fixed_and_commutant([A, A.conj().T]).commutant_dim == 1


def test_commutant_block_diagonal():
    D = np.diag([1, 1, 2, 3.0])
    res = tq.fixed_and_commutant([D])
    assert res.commutant_dim == 6


@pytest.mark.parametrize("k", [1, 3])
def test_genus2_irreducible_prime(k):
    res = tq.fixed_and_commutant(tq.genus2_rep(k))
    assert res.commutant_dim == 1 and res.fixed_dim == 0
    assert res.gap >= 1e4 * 1e-10


def test_commutant_empty():
    with pytest.raises(DomainError):
        tq.fixed_and_commutant([])


def test_summary_row():
    row = tq.summary_row(2, 1)
    assert row["dim"] == 4 and row["commutant_dim"] == 1 and row["min_gram_eig"] > 0
