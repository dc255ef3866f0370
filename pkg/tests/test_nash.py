import numpy as np
import pytest
from numpy.testing import assert_allclose

from oracles import grid_rank1_max, random_strategy, random_tensor
from sdgames.constructions import FIVE_EQUILIBRIA, five_equilibria_game, hybrid_best_response, hybrid_game
from sdgames.errors import ContractViolation
from sdgames.games import SemidefiniteGame, column_player_matrix, payoff, row_player_matrix
from sdgames.nash import (best_response, best_response_column, membership_P, membership_Q, nash_gap,
                          verify_nash)
from sdgames.symlin import rotated_rank1_decomposition

HALF = np.full((2, 2), 0.5)
ZERO = SemidefiniteGame(np.zeros((2, 2, 2, 2)), np.zeros((2, 2, 2, 2)))


def test_membership_P_examples():
    B = five_equilibria_game(1.0).B
    assert membership_P(HALF, 1.5, B) >= -1e-12
    assert membership_P(np.diag([1.0, 0.0]), 0.9, B) < -1e-8
    assert membership_P(np.eye(2) / 2, 0.0, ZERO.B) >= 0


def test_membership_Q_examples():
    assert membership_Q(np.eye(2) / 2, 0.0, ZERO.A) >= 0
    assert membership_Q(HALF, 0.6, hybrid_game(0.1).A) >= -1e-12
    assert membership_Q(HALF, 0.59, hybrid_game(0.1).A) < 0


def test_membership_Q_matches_eigen_oracle():
    rng = np.random.default_rng(50)
    for _ in range(20):
        A = random_tensor(rng, 2, 3)
        Y = random_strategy(rng, 3)
        lam = np.linalg.eigvalsh(column_player_matrix(A, Y)).max()
        for u in (lam - 1e-6, lam + 1e-9, lam + 0.5):
            assert (membership_Q(Y, u, A) >= -1e-9) == (u >= lam - 1e-9)


def test_membership_P_monotone_in_v():
    rng = np.random.default_rng(51)
    B = random_tensor(rng, 2, 2)
    X = random_strategy(rng, 2)
    vs = np.linspace(-3, 3, 61)
    member = [membership_P(X, v, B) >= -1e-9 for v in vs]
    first = member.index(True)
    assert all(member[first:])


def test_best_response_hybrid_closed_form():
    for eps in (0.0, 0.05, 0.1, 0.25):
        g = hybrid_game(eps)
        for pure in (0, 1):
            X = np.diag([1.0, 0.0]) if pure == 0 else np.diag([0.0, 1.0])
            R, val = best_response_column(g.B, X)
            assert_allclose(R, hybrid_best_response(eps, pure), atol=1e-10)
            assert val == pytest.approx(payoff(g.B, X, R), abs=1e-9)


def test_best_response_zero_and_random():
    R, val = best_response(ZERO.A, np.eye(2) / 2)
    assert val == 0.0 and np.trace(R) == pytest.approx(1.0)
    rng = np.random.default_rng(52)
    for _ in range(20):
        A = random_tensor(rng, 2, 2)
        Y = random_strategy(rng, 2)
        X, val = best_response(A, Y)
        assert payoff(A, X, Y) == pytest.approx(val, abs=1e-9)
        assert val == pytest.approx(grid_rank1_max(column_player_matrix(A, Y)), abs=1e-3)


def test_five_equilibria_verify():
    g = five_equilibria_game(1.0)
    pays = [1.0, 1.0, 1.5, 1.5, 0.5]
    for X, p in zip(FIVE_EQUILIBRIA, pays):
        cert = verify_nash(g, X, X, tol=1e-7)
        assert cert.verdict
        assert cert.u == pytest.approx(p, abs=1e-12) and cert.v == pytest.approx(p, abs=1e-12)
        assert max(nash_gap(g, X, X)) <= 1e-8


def test_perturbed_pair_fails():
    g = five_equilibria_game(1.0)
    X = np.diag([0.6, 0.4])
    cert = verify_nash(g, X, X)
    assert not cert
    assert min(cert.gaps) >= 0.01


def test_zero_game_everything_is_nash():
    rng = np.random.default_rng(53)
    for _ in range(5):
        X, Y = random_strategy(rng, 2), random_strategy(rng, 2)
        cert = verify_nash(ZERO, X, Y)
        assert cert.verdict and cert.u == 0 and cert.v == 0
        assert nash_gap(ZERO, X, Y) == (0.0, 0.0)


def test_invalid_strategy():
    with pytest.raises(ContractViolation, match="invalid strategy"):
        verify_nash(ZERO, np.eye(2), np.eye(2) / 2)


def test_verdict_implies_small_gaps():
    g = five_equilibria_game(1.0)
    for X in FIVE_EQUILIBRIA:
        cert = verify_nash(g, X, X, tol=1e-8)
        assert max(cert.gaps) <= 2e-8


def test_gap_matches_grid_oracle():
    rng = np.random.default_rng(54)
    for _ in range(10):
        g = SemidefiniteGame(random_tensor(rng, 2, 2), random_tensor(rng, 2, 2))
        X, Y = random_strategy(rng, 2), random_strategy(rng, 2)
        g1, g2 = nash_gap(g, X, Y)
        assert g1 == pytest.approx(grid_rank1_max(column_player_matrix(g.A, Y)) - payoff(g.A, X, Y), abs=1e-3)
        assert g2 == pytest.approx(grid_rank1_max(row_player_matrix(g.B, X)) - payoff(g.B, X, Y), abs=1e-3)


def test_rotation_robustness():
    g = five_equilibria_game(1.0)
    X = np.eye(2) / 2
    rng = np.random.default_rng(55)
    for _ in range(5):
        d = rotated_rank1_decomposition(X, rng)
        assert verify_nash(g, X, X, decompositions=(d, d)).verdict
    # a non-equilibrium stays rejected under any rotation
    Xb = np.diag([0.6, 0.4])
    for _ in range(5):
        d = rotated_rank1_decomposition(Xb, rng)
        assert not verify_nash(g, Xb, Xb, decompositions=(d, d)).verdict


def test_certificate_dict():
    cert = verify_nash(five_equilibria_game(1.0), HALF, HALF)
    d = cert.to_dict()
    assert d["verdict"] is True and d["u"] == pytest.approx(1.5)
    assert len(d["atom_residuals_X"]) == 1
