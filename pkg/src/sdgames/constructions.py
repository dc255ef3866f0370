"""Generators for the worked example games and the block construction with many equilibria."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from . import sdp
from .errors import ContractViolation, UnsupportedConfiguration
from .games import SemidefiniteGame, check_strategy, payoff
from .nash import NashCertificate, verify_nash

HYBRID_EPS_CAP = 0.25
ENUMERATION_BLOCK_CAP = 6


def plus_one_game() -> SemidefiniteGame:
    A = np.zeros((2, 2, 2, 2))
    for i, j, k, l in itertools.product(range(2), repeat=4):
        A[i, j, k, l] = np.sign(max(i, j) - max(k, l))
    return SemidefiniteGame.zero_sum(A, name="plus-one")


def nondiagonal_game() -> SemidefiniteGame:
    A = np.zeros((2, 2, 2, 2))
    for i, j, k, l in itertools.product(range(2), repeat=4):
        A[i, j, k, l] = (i + j) - (k + l)
    return SemidefiniteGame.zero_sum(A, name="nondiagonal")


def hybrid_game(eps: float) -> SemidefiniteGame:
    """Player 1 effectively plays the diagonal; identical payoffs ``A = B``."""
    eps = float(eps)
    if not (0.0 <= eps <= HYBRID_EPS_CAP):
        warnings.warn(f"hybrid game best-response formulas are derived for small eps; got {eps}",
                      stacklevel=2)
    A = np.zeros((2, 2, 2, 2))
    A[0, 0] = [[1.0, eps], [eps, 0.0]]
    A[1, 1] = [[0.0, eps], [eps, 1.0]]
    return SemidefiniteGame(A, A.copy(), name="hybrid", params={"eps": eps})


def hybrid_best_response(eps: float, pure: int) -> np.ndarray:
    """Closed-form rank-1 best response of player 2 to player 1's pure strategy ``pure`` (0 or 1)."""
    r = np.sqrt(4.0 * eps**2 + 1.0)
    if pure == 0:
        M = [[r + 1.0, 2.0 * eps], [2.0 * eps, r - 1.0]]
    else:
        M = [[r - 1.0, 2.0 * eps], [2.0 * eps, r + 1.0]]
    return np.array(M) / (2.0 * r)


def _five_block(c: float) -> np.ndarray:
    A = np.zeros((2, 2, 2, 2))
    A[:, :, 0, 0] = [[1.0, 0.0], [0.0, 0.0]]
    A[:, :, 0, 1] = A[:, :, 1, 0] = [[0.0, c], [c, 0.0]]
    A[:, :, 1, 1] = [[0.0, 0.0], [0.0, 1.0]]
    return A


def five_equilibria_game(c: float) -> SemidefiniteGame:
    A = _five_block(float(c))
    return SemidefiniteGame(A, A.copy(), name="five", params={"c": float(c)})


FIVE_EQUILIBRIA = (
    np.array([[1.0, 0.0], [0.0, 0.0]]),
    np.array([[0.0, 0.0], [0.0, 1.0]]),
    np.array([[0.5, 0.5], [0.5, 0.5]]),
    np.array([[0.5, -0.5], [-0.5, 0.5]]),
    np.array([[0.5, 0.0], [0.0, 0.5]]),
)


def five_equilibria(c: float = 1.0) -> list[tuple[np.ndarray, np.ndarray, float]]:
    """The symmetric equilibria ``(X, X)`` of the five-equilibria game with their common payoff."""
    pays = (1.0, 1.0, 0.5 + c, 0.5 + c, 0.5)
    return [(X.copy(), X.copy(), p) for X, p in zip(FIVE_EQUILIBRIA, pays)]


def dantzig_example_sdp() -> sdp.SdpProblem:
    """``min <2I, X>`` subject to ``<I, X> >= 1``."""
    return sdp.SdpProblem.from_data(2.0 * np.eye(2), [np.eye(2)], [1.0], sdp.Sense.GEQ)


def block_tensor(parts) -> np.ndarray:
    parts = [np.asarray(P, dtype=float) for P in parts]
    if not parts:
        raise ContractViolation("block_tensor needs at least one block")
    M = sum(P.shape[0] for P in parts)
    N = sum(P.shape[2] for P in parts)
    out = np.zeros((M, M, N, N))
    i0 = k0 = 0
    for P in parts:
        mi, ni = P.shape[0], P.shape[2]
        out[i0:i0 + mi, i0:i0 + mi, k0:k0 + ni, k0:k0 + ni] = P
        i0 += mi
        k0 += ni
    return out


def block_game(games) -> SemidefiniteGame:
    games = list(games)
    return SemidefiniteGame(block_tensor([g.A for g in games]), block_tensor([g.B for g in games]),
                            name="block")


@dataclass(frozen=True)
class BlockWeights:
    alpha: np.ndarray
    beta: np.ndarray


def _reciprocal_weights(pays, active) -> np.ndarray:
    w = np.zeros(len(active))
    for k, on in enumerate(active):
        if on:
            if not pays[k] > 0:
                raise UnsupportedConfiguration(
                    f"block {k} has nonpositive equilibrium payoff {pays[k]}; weights are undefined")
            w[k] = 1.0 / pays[k]
    return w / w.sum()


def combine_block_equilibria(games, eqs):
    """Glue per-block equilibria into one equilibrium of the block game.

    ``eqs[k]`` is either ``None`` (the block gets zero weight) or a pair
    ``(X_k, Y_k)`` forming an equilibrium of ``games[k]``.  Player 1's block
    weights are proportional to ``1 / p_B(X_k, Y_k)`` and player 2's to
    ``1 / p_A(X_k, Y_k)``, which equalizes every active block's best-response value.
    """
    games = list(games)
    eqs = list(eqs)
    if len(games) != len(eqs):
        raise ContractViolation("need one entry of eqs per block game")
    active = [e is not None for e in eqs]
    if not any(active):
        raise ContractViolation("at least one block must be active")
    pa = np.zeros(len(games))
    pb = np.zeros(len(games))
    for k, (g, e) in enumerate(zip(games, eqs)):
        if e is not None:
            pa[k] = payoff(g.A, e[0], e[1])
            pb[k] = payoff(g.B, e[0], e[1])
    alpha = _reciprocal_weights(pb, active)
    beta = _reciprocal_weights(pa, active)
    Xs, Ys = [], []
    for k, (g, e) in enumerate(zip(games, eqs)):
        if e is None:
            Xs.append(np.zeros((g.m, g.m)))
            Ys.append(np.zeros((g.n, g.n)))
        else:
            Xs.append(alpha[k] * np.asarray(e[0], dtype=float))
            Ys.append(beta[k] * np.asarray(e[1], dtype=float))
    X = sdp.BlockLayout([g.m for g in games]).embed(Xs)
    Y = sdp.BlockLayout([g.n for g in games]).embed(Ys)
    return X, Y, BlockWeights(alpha, beta)


def many_nash_family(n: int, c: float) -> SemidefiniteGame:
    """``n / 2`` diagonal copies of the five-equilibria block, ``A = B``."""
    if n < 2 or n % 2:
        raise ContractViolation(f"n must be an even integer >= 2, got {n}")
    A = block_tensor([_five_block(float(c))] * (n // 2))
    return SemidefiniteGame(A, A.copy(), name="family", params={"n": n, "c": float(c)})


@dataclass(frozen=True)
class EquilibriumProfile:
    choice: tuple  # per block: None (inactive) or an index into FIVE_EQUILIBRIA
    X: np.ndarray
    Y: np.ndarray
    weights: BlockWeights


def enumerate_block_equilibria(n: int, c: float, tol: float = 1e-7,
                               verify: bool = True) -> list[tuple[EquilibriumProfile, NashCertificate | None]]:
    """All ``6^(n/2) - 1`` block profiles of the family game, in lexicographic order of choices.

    Each block is either inactive or plays one of the five block equilibria;
    the all-inactive choice is skipped.
    """
    if c <= 0.5:
        raise UnsupportedConfiguration("the five distinct block equilibria require c > 1/2")
    game = many_nash_family(n, c)
    r = n // 2
    if r > ENUMERATION_BLOCK_CAP:
        raise UnsupportedConfiguration(f"n/2 = {r} exceeds the enumeration cap {ENUMERATION_BLOCK_CAP}")
    block = five_equilibria_game(c)
    out = []
    for choice in itertools.product([None, 0, 1, 2, 3, 4], repeat=r):
        if all(ch is None for ch in choice):
            continue
        eqs = [None if ch is None else (FIVE_EQUILIBRIA[ch], FIVE_EQUILIBRIA[ch]) for ch in choice]
        X, Y, w = combine_block_equilibria([block] * r, eqs)
        prof = EquilibriumProfile(choice, X, Y, w)
        cert = verify_nash(game, X, Y, tol) if verify else None
        out.append((prof, cert))
    return out


def _bimatrix_gaps(Amat, Bmat, x, y) -> tuple[float, float]:
    u = x @ Amat @ y
    v = x @ Bmat @ y
    return float(np.max(Amat @ y) - u), float(np.max(x @ Bmat) - v)


def diagonal_equilibrium_lift(Amat, Bmat, x, y, Gbar: SemidefiniteGame, tol: float = 1e-8):
    """Lift a bimatrix equilibrium ``(x, y)`` to ``(diag(x), diag(y))`` in ``Gbar``.

    ``Gbar`` must extend the bimatrix payoffs on its diagonal and vanish on the
    entries ``[i, i, k, l]`` (``k != l``) and ``[i, j, k, k]`` (``i != j``).
    """
    Amat = np.asarray(Amat, dtype=float)
    Bmat = np.asarray(Bmat, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = Amat.shape
    if Gbar.m != m or Gbar.n != n:
        raise ContractViolation("lifted game dimensions do not match the bimatrix game")
    for T, Mat in ((Gbar.A, Amat), (Gbar.B, Bmat)):
        for i in range(m):
            for k in range(n):
                if T[i, i, k, k] != Mat[i, k]:
                    raise ContractViolation(f"diagonal entry [{i},{i},{k},{k}] differs from the bimatrix payoff")
        off_kl = ~np.eye(n, dtype=bool)
        off_ij = ~np.eye(m, dtype=bool)
        if np.any(T[np.arange(m), np.arange(m)][:, off_kl] != 0):
            raise ContractViolation("lift hypothesis violated: nonzero entry [i, i, k, l] with k != l")
        if np.any(np.einsum("ijkk->ijk", T)[off_ij] != 0):
            raise ContractViolation("lift hypothesis violated: nonzero entry [i, j, k, k] with i != j")
    g1, g2 = _bimatrix_gaps(Amat, Bmat, x, y)
    if (np.any(x < -1e-12) or np.any(y < -1e-12) or abs(x.sum() - 1) > 1e-9
            or abs(y.sum() - 1) > 1e-9 or max(g1, g2) > 1e-9):
        raise ContractViolation(f"(x, y) is not a bimatrix Nash equilibrium (gaps {g1:.3e}, {g2:.3e})")
    X = check_strategy(np.diag(x))
    Y = check_strategy(np.diag(y))
    return X, Y, verify_nash(Gbar, X, Y, tol)
