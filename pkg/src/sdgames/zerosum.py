"""Zero-sum semidefinite games solved through a dual pair of SDPs.

Player 1 maximizes ``v`` over ``X`` such that ``(<X, A..kl>) - v I`` is PSD; player 2
minimizes ``-w`` over ``Y`` such that ``(<-A ij.., Y>) - w I`` is PSD.  Both are
posed on a block variable ``diag(strategy, slack, v+, v-)`` with the free scalar
split into two nonnegative parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sdp
from .errors import NumericalFailure
from .games import check_strategy, column_player_matrix, payoff_tensor, row_player_matrix
from .symlin import max_eigenvalue, min_eigenvalue


@dataclass
class ZeroSumSolution:
    V: float
    X_star: np.ndarray
    Y_star: np.ndarray
    T: np.ndarray
    S: np.ndarray
    v1: float
    w1: float
    gap: float
    maxmin: sdp.SdpSolution
    minmax: sdp.SdpSolution

    @property
    def value(self) -> float:
        return self.V

    def residuals(self) -> dict:
        return {
            "maxmin_primal": self.maxmin.primal_residual,
            "maxmin_dual": self.maxmin.dual_residual,
            "maxmin_gap": self.maxmin.rel_gap,
            "minmax_primal": self.minmax.primal_residual,
            "minmax_dual": self.minmax.dual_residual,
            "minmax_gap": self.minmax.rel_gap,
            "value_gap": self.gap,
        }


def _guarantee_sdp(M_of, size: int, resp: int) -> sdp.SdpProblem:
    """``min -(v+ - v-)`` over ``diag(Z, T, v+, v-)`` with ``(v+ - v-) I + T = M_of(Z)`` and ``tr Z = 1``.

    ``M_of(k, l)`` returns the ``size x size`` matrix ``G`` with ``<Z, G> = M(Z)[k, l]``.
    """
    L = sdp.BlockLayout([size, resp, 1, 1])
    C = L.block_matrix(2, -1.0) + L.block_matrix(3, 1.0)
    cons = []
    for k in range(resp):
        for l in range(k, resp):
            G = L.entry_selector(1, k, l) - L.block_matrix(0, M_of(k, l))
            if k == l:
                G = G + L.block_matrix(2, 1.0) - L.block_matrix(3, 1.0)
            cons.append(sdp.Constraint(G, 0.0))
    cons.append(sdp.Constraint(L.block_matrix(0, np.eye(size)), 1.0))
    return sdp.SdpProblem(C, tuple(cons))


def build_maxmin_sdp(A) -> sdp.SdpProblem:
    """Player 1's SDP; its optimal value is ``-V`` (it minimizes ``-v1``)."""
    A = payoff_tensor(A)
    m, n = A.shape[0], A.shape[2]
    return _guarantee_sdp(lambda k, l: A[:, :, k, l], m, n)


def build_minmax_sdp(A) -> sdp.SdpProblem:
    """Player 2's SDP; its optimal value is ``V``."""
    A = payoff_tensor(A)
    m, n = A.shape[0], A.shape[2]
    return _guarantee_sdp(lambda i, j: -A[i, j, :, :], n, m)


def _unpack(sol: sdp.SdpSolution, size: int, resp: int):
    L = sdp.BlockLayout([size, resp, 1, 1])
    Z, T, vp, vm = L.extract(sol.X)
    return Z, T, float(vp[0, 0] - vm[0, 0])


def saddle_residual(A, X, Y, V: float) -> float:
    """Largest violation of the conditions certifying ``(X, Y)`` optimal with value ``V``."""
    m, n = A.shape[0], A.shape[2]
    return max(
        0.0,
        V - min_eigenvalue(row_player_matrix(A, X)),
        max_eigenvalue(column_player_matrix(A, Y)) - V,
        -min_eigenvalue(X), -min_eigenvalue(Y),
        abs(np.trace(X) - 1.0), abs(np.trace(Y) - 1.0),
    ) if X.shape == (m, m) and Y.shape == (n, n) else np.inf


def _factor(Z, r):
    w, U = np.linalg.eigh(Z)
    w, U = w[::-1][:r], U[:, ::-1][:, :r]
    P = U * np.sqrt(np.maximum(w, 0.0))
    return P / np.linalg.norm(P)


def _candidate_ranks(Z):
    w = np.sort(np.maximum(np.linalg.eigvalsh(Z), 0.0))[::-1]
    k = len(w)
    # prefer ranks at large relative eigenvalue gaps
    score = [np.log10((w[r - 1] + 1e-300) / (w[r] + 1e-300)) if r < k else 0.5 for r in range(1, k + 1)]
    return [r for _, r in sorted(zip(score, range(1, k + 1)), key=lambda t: -t[0])]


def _newton_saddle(A, P, Q, V, iters=40):
    """Gauss-Newton on ``Mcol(QQ^T) P = V P``, ``Mrow(PP^T) Q = V Q``, ``|P| = |Q| = 1``."""
    m, rx = P.shape
    n, ry = Q.shape
    nx, ny = m * rx, n * ry

    def F(P, Q, V):
        Mc = column_player_matrix(A, Q @ Q.T)
        Mr = row_player_matrix(A, P @ P.T)
        return np.concatenate([(Mc @ P - V * P).ravel(), (Mr @ Q - V * Q).ravel(),
                               [np.sum(P * P) - 1.0, np.sum(Q * Q) - 1.0]])

    def J(P, Q, V):
        Mc = column_player_matrix(A, Q @ Q.T)
        Mr = row_player_matrix(A, P @ P.T)
        cols = []
        for t in range(nx + ny + 1):
            dP = np.zeros_like(P)
            dQ = np.zeros_like(Q)
            dV = 0.0
            if t < nx:
                dP.flat[t] = 1.0
            elif t < nx + ny:
                dQ.flat[t - nx] = 1.0
            else:
                dV = 1.0
            dY = dQ @ Q.T + Q @ dQ.T
            dX = dP @ P.T + P @ dP.T
            f1 = column_player_matrix(A, dY) @ P + Mc @ dP - dV * P - V * dP
            f2 = row_player_matrix(A, dX) @ Q + Mr @ dQ - dV * Q - V * dQ
            cols.append(np.concatenate([f1.ravel(), f2.ravel(),
                                        [2.0 * np.sum(P * dP), 2.0 * np.sum(Q * dQ)]]))
        return np.column_stack(cols)

    for _ in range(iters):
        r = F(P, Q, V)
        if np.linalg.norm(r) < 1e-15:
            break
        step = np.linalg.lstsq(J(P, Q, V), r, rcond=None)[0]
        P = P - step[:nx].reshape(P.shape)
        Q = Q - step[nx:nx + ny].reshape(Q.shape)
        V = V - step[-1]
    return P @ P.T, Q @ Q.T, float(V)


def polish_saddle(A, X, Y, V: float, max_move: float = 1e-2):
    """Refine an approximate saddle point on the face suggested by its ranks.

    Returns ``(X, Y, V)``; the input is returned unchanged unless a refined point
    near it certifies optimality with a strictly smaller :func:`saddle_residual`.
    """
    A = np.asarray(A, dtype=float)
    best = (X, Y, V)
    best_res = saddle_residual(A, X, Y, V)
    for rx in _candidate_ranks(X)[:3]:
        for ry in _candidate_ranks(Y)[:3]:
            try:
                Xp, Yp, Vp = _newton_saddle(A, _factor(X, rx), _factor(Y, ry), V)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(Xp)) or not np.all(np.isfinite(Yp)):
                continue
            if max(np.abs(Xp - X).max(), np.abs(Yp - Y).max(), abs(Vp - V)) > max_move:
                continue
            res = saddle_residual(A, Xp, Yp, Vp)
            if res < best_res:
                best, best_res = (Xp, Yp, Vp), res
        if best_res < 1e-13:
            break
    return best


def solve_zero_sum(A, tol: float = sdp.DEFAULT_TOL, polish: bool = True) -> ZeroSumSolution:
    """Value and optimal strategies from the max-min and min-max SDPs.

    With ``polish`` the interior point answer is refined by :func:`polish_saddle`,
    which matters when the optimum is not strictly complementary and the
    interior point iterates approach it only like a cube root of the gap.
    """
    A = payoff_tensor(A)
    m, n = A.shape[0], A.shape[2]
    s1 = sdp.solve(build_maxmin_sdp(A), tol)
    s2 = sdp.solve(build_minmax_sdp(A), tol)
    for name, s in (("max-min", s1), ("min-max", s2)):
        if not s.optimal:
            raise NumericalFailure(f"{name} SDP ended with status {s.status.value}")
    X, T, v1 = _unpack(s1, m, n)
    Y, S, w1 = _unpack(s2, n, m)
    V = (v1 - w1) / 2.0
    if polish:
        Xp, Yp, Vp = polish_saddle(A, X, Y, V)
        if Xp is not X:
            X, Y, V = Xp, Yp, Vp
            T = row_player_matrix(A, X) - V * np.eye(n)
            S = V * np.eye(m) - column_player_matrix(A, Y)
    return ZeroSumSolution(V=V, X_star=X, Y_star=Y, T=T, S=S, v1=v1, w1=w1,
                           gap=abs(v1 + w1), maxmin=s1, minmax=s2)


def optimal_set_membership(A, V: float, Z, player: int, tol: float = 1e-8) -> bool:
    """Whether ``Z`` lies in the optimal-strategy spectrahedron of ``player`` for value ``V``."""
    A = payoff_tensor(A)
    Z = np.asarray(Z, dtype=float)
    if player == 1:
        if Z.shape != A.shape[:2]:
            return False
        M = row_player_matrix(A, Z) - V * np.eye(A.shape[2])
    elif player == 2:
        if Z.shape != A.shape[2:]:
            return False
        M = V * np.eye(A.shape[0]) - column_player_matrix(A, Z)
    else:
        raise ValueError("player must be 1 or 2")
    return (min_eigenvalue(Z) >= -tol and abs(np.trace(Z) - 1.0) <= tol
            and min_eigenvalue(M) >= -tol)


def best_response_value(A, fixed, fixed_player: int) -> float:
    """Payoff to player 1 when the other side best-responds to ``fixed``.

    With player 1 fixed this is the smallest eigenvalue of ``(<X, A..kl>)``,
    with player 2 fixed the largest eigenvalue of ``(<A ij.., Y>)``.
    """
    A = payoff_tensor(A)
    if fixed_player == 1:
        X = check_strategy(fixed, A.shape[0])
        return min_eigenvalue(row_player_matrix(A, X))
    if fixed_player == 2:
        Y = check_strategy(fixed, A.shape[2])
        return max_eigenvalue(column_player_matrix(A, Y))
    raise ValueError("fixed_player must be 1 or 2")
