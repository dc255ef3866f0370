import itertools
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from sdgames import sdp
from sdgames.constructions import (FIVE_EQUILIBRIA, block_game, block_tensor, combine_block_equilibria,
                                   dantzig_example_sdp, diagonal_equilibrium_lift, enumerate_block_equilibria,
                                   five_equilibria, five_equilibria_game, hybrid_best_response, hybrid_game,
                                   many_nash_family, nondiagonal_game, plus_one_game)
from sdgames.errors import ContractViolation, UnsupportedConfiguration
from sdgames.games import SemidefiniteGame, embed_bimatrix, is_bisymmetric, is_skew_symmetric_game, payoff
from sdgames.nash import verify_nash


def test_generators_bisymmetric():
    for g in (plus_one_game(), nondiagonal_game(), hybrid_game(0.1), five_equilibria_game(1.0),
              many_nash_family(4, 1.0)):
        assert is_bisymmetric(g.A) and is_bisymmetric(g.B)


def test_plus_one_entries():
    A = plus_one_game().A
    assert A[1, 1, 0, 0] == 1 and A[0, 0, 1, 1] == -1
    assert is_skew_symmetric_game(A)
    assert_array_equal(np.einsum("iikk->ik", A), [[0, -1], [1, 0]])
    assert plus_one_game().is_zero_sum


def test_nondiagonal_entries():
    A = nondiagonal_game().A
    assert A[0, 0, 1, 1] == -2
    assert A[1, 1, 0, 0] == 2
    assert is_skew_symmetric_game(A)


def test_hybrid():
    eps = 0.1
    g = hybrid_game(eps)
    assert_allclose(g.A[0, 0], [[1, eps], [eps, 0]])
    assert_allclose(g.A[1, 1], [[0, eps], [eps, 1]])
    assert np.all(g.A[0, 1] == 0) and np.all(g.A == g.B)
    cert = verify_nash(g, np.eye(2) / 2, np.full((2, 2), 0.5))
    assert cert.verdict and cert.u == pytest.approx(0.5 + eps)


def test_hybrid_eps_zero_decouples():
    g = hybrid_game(0.0)
    for k in (0, 1):
        E = np.zeros((2, 2))
        E[k, k] = 1.0
        assert_allclose(hybrid_best_response(0.0, k), E)
        assert verify_nash(g, E, E).verdict


def test_hybrid_warns_outside_range():
    with pytest.warns(UserWarning):
        hybrid_game(0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hybrid_game(0.25)


def test_five_game_slices():
    g = five_equilibria_game(0.7)
    assert_array_equal(g.A[:, :, 0, 0], [[1, 0], [0, 0]])
    assert_allclose(g.A[:, :, 0, 1], [[0, 0.7], [0.7, 0]])
    assert_array_equal(g.A[:, :, 1, 1], [[0, 0], [0, 1]])
    for c in (0.0, 1.0, 3.0):
        assert payoff(five_equilibria_game(c).A, FIVE_EQUILIBRIA[2], FIVE_EQUILIBRIA[2]) == pytest.approx(0.5 + c)


def test_five_equilibria_payoffs():
    g = five_equilibria_game(1.0)
    for X, Y, p in five_equilibria(1.0):
        cert = verify_nash(g, X, Y, tol=1e-7)
        assert cert.verdict and cert.u == pytest.approx(p, abs=1e-7)


def test_five_boundary_family():
    # at c = 1/2 every rank-1 X = Y with x11 in (0, 1) and maximal off-diagonal is an equilibrium
    g = five_equilibria_game(0.5)
    for a in np.linspace(0.05, 0.95, 10):
        u = np.array([np.sqrt(a), np.sqrt(1 - a)])
        X = np.outer(u, u)
        assert verify_nash(g, X, X, tol=1e-8).verdict


def test_dantzig_example_data():
    p = dantzig_example_sdp()
    assert p.is_modified_form and p.m == 1
    assert_array_equal(p.C, 2 * np.eye(2))
    s = sdp.solve(p)
    assert s.primal_obj == pytest.approx(2.0, abs=1e-7)


def test_block_tensor():
    g = five_equilibria_game(1.0)
    A4 = block_tensor([g.A, g.A])
    assert A4.shape == (4, 4, 4, 4)
    assert_array_equal(A4, many_nash_family(4, 1.0).A)
    assert_array_equal(block_tensor([g.A]), g.A)
    rng = np.random.default_rng(60)
    P1, P2 = rng.standard_normal((2, 2, 3, 3)), rng.standard_normal((1, 1, 2, 2))
    T = block_tensor([P1, P2])
    mask = np.zeros(T.shape, dtype=bool)
    mask[:2, :2, :3, :3] = True
    mask[2:, 2:, 3:, 3:] = True
    assert np.all(T[~mask] == 0)
    assert_array_equal(T[2, 2, 3:, 3:], P2[0, 0])
    with pytest.raises(ContractViolation):
        block_tensor([])


def test_family_structure():
    assert_array_equal(many_nash_family(2, 1.0).A, five_equilibria_game(1.0).A)
    A = many_nash_family(6, 1.0).A
    for s, t in itertools.product(range(3), repeat=2):
        blk = A[2 * s:2 * s + 2, 2 * s:2 * s + 2, 2 * t:2 * t + 2, 2 * t:2 * t + 2]
        if s != t:
            assert np.all(blk == 0)
    with pytest.raises(ContractViolation):
        many_nash_family(3, 1.0)


def test_combine_equal_payoffs():
    g = five_equilibria_game(1.0)
    X0 = FIVE_EQUILIBRIA[0]
    X, Y, w = combine_block_equilibria([g, g], [(X0, X0), (FIVE_EQUILIBRIA[1],) * 2])
    assert_allclose(w.alpha, [0.5, 0.5])
    assert_allclose(w.beta, [0.5, 0.5])


def test_combine_unequal_payoffs_verifies():
    g = five_equilibria_game(1.0)
    eqs = [(FIVE_EQUILIBRIA[0],) * 2, (FIVE_EQUILIBRIA[2],) * 2]
    X, Y, w = combine_block_equilibria([g, g], eqs)
    assert_allclose(w.alpha, [0.6, 0.4])
    assert_allclose(w.beta, [0.6, 0.4])
    assert w.alpha[0] * 1.0 == pytest.approx(w.alpha[1] * 1.5)
    assert verify_nash(block_game([g, g]), X, Y, tol=1e-7).verdict


def test_combine_single_active_block():
    g = five_equilibria_game(1.0)
    X, Y, w = combine_block_equilibria([g, g], [None, (FIVE_EQUILIBRIA[3],) * 2])
    assert np.all(X[:2, :2] == 0)
    assert_allclose(X[2:, 2:], FIVE_EQUILIBRIA[3])
    assert verify_nash(block_game([g, g]), X, Y).verdict


def test_combine_nonpositive_payoff():
    A = -five_equilibria_game(1.0).A
    g = SemidefiniteGame(A, A)
    with pytest.raises(UnsupportedConfiguration):
        combine_block_equilibria([g], [(FIVE_EQUILIBRIA[0],) * 2])
    with pytest.raises(ContractViolation):
        combine_block_equilibria([g], [None])


@pytest.mark.parametrize("n,count", [(2, 5), (4, 35), (6, 215)])
def test_enumeration_counts(n, count):
    out = enumerate_block_equilibria(n, 1.0)
    assert len(out) == count == 6 ** (n // 2) - 1
    assert all(cert.verdict for _, cert in out)
    for prof, _ in out:
        assert sum(prof.weights.alpha) == pytest.approx(1.0, abs=1e-12)
        assert np.trace(prof.X) == pytest.approx(1.0, abs=1e-12)


def test_enumeration_order_and_distinct():
    out = enumerate_block_equilibria(4, 1.0, verify=False)
    choices = [p.choice for p, _ in out]
    assert choices[0] == (None, 0) and choices[-1] == (4, 4)
    Xs = [p.X for p, _ in out]
    for a, b in itertools.combinations(range(len(Xs)), 2):
        assert np.linalg.norm(Xs[a] - Xs[b]) >= 0.1


def test_enumeration_limits():
    with pytest.raises(UnsupportedConfiguration):
        enumerate_block_equilibria(14, 1.0)
    with pytest.raises(UnsupportedConfiguration):
        enumerate_block_equilibria(4, 0.5)


def test_lift_matching_pennies():
    M = np.array([[1.0, -1.0], [-1.0, 1.0]])
    g = embed_bimatrix(M, -M)
    X, Y, cert = diagonal_equilibrium_lift(M, -M, [0.5, 0.5], [0.5, 0.5], g)
    assert cert.verdict
    assert_allclose(X, np.eye(2) / 2)


def test_lift_coordination():
    M = np.eye(2)
    X, Y, cert = diagonal_equilibrium_lift(M, M, [1.0, 0.0], [1.0, 0.0], embed_bimatrix(M, M))
    assert cert.verdict


def test_lift_rejects_bad_input():
    M = np.eye(2)
    g = embed_bimatrix(M, M)
    A = g.A.copy()
    A[0, 0, 0, 1] = A[0, 0, 1, 0] = 0.3
    with pytest.raises(ContractViolation, match="hypothesis"):
        diagonal_equilibrium_lift(M, M, [1.0, 0.0], [1.0, 0.0], SemidefiniteGame(A, g.B))
    with pytest.raises(ContractViolation, match="not a bimatrix"):
        diagonal_equilibrium_lift(M, M, [1.0, 0.0], [0.0, 1.0], g)
