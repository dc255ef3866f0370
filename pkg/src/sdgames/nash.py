"""Nash equilibria of general two-player semidefinite games.

A pair ``(X, Y)`` with payoffs ``u = p_A(X, Y)`` and ``v = p_B(X, Y)`` is an
equilibrium exactly when ``(X, v)`` lies in the spectrahedron P, ``(Y, u)`` in Q,
and every rank-1 atom of a decomposition of ``X`` (resp. ``Y``) earns ``u``
(resp. ``v``) against the opponent.  The atoms are taken from the spectral
decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .games import SemidefiniteGame, check_strategy, column_player_matrix, payoff, row_player_matrix
from .symlin import DEFAULT_RANK_TOL, Rank1Decomposition, max_eigenvalue, min_eigenvalue, rank1_decompose, sym_eig


@dataclass
class NashCertificate:
    X: np.ndarray
    Y: np.ndarray
    u: float
    v: float
    P_residual: float
    Q_residual: float
    atom_residuals_X: np.ndarray
    atom_residuals_Y: np.ndarray
    tol: float
    gaps: tuple = field(default=(0.0, 0.0))

    @property
    def verdict(self) -> bool:
        atoms = np.concatenate([self.atom_residuals_X, self.atom_residuals_Y])
        return bool(self.P_residual >= -self.tol and self.Q_residual >= -self.tol
                    and (atoms.size == 0 or np.max(np.abs(atoms)) <= self.tol))

    def __bool__(self) -> bool:
        return self.verdict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "u": self.u,
            "v": self.v,
            "P_residual": self.P_residual,
            "Q_residual": self.Q_residual,
            "atom_residuals_X": self.atom_residuals_X.tolist(),
            "atom_residuals_Y": self.atom_residuals_Y.tolist(),
            "gaps": list(self.gaps),
            "tol": self.tol,
        }


def _trace_residual(Z) -> float:
    return -abs(float(np.trace(Z)) - 1.0)


def membership_P(X, v: float, B, tol: float = 1e-8) -> float:
    """Signed residual of ``(X, v)`` in P; member iff the result is ``>= -tol``.

    Equivalently ``v`` bounds player 2's best-response value ``lambda_max((<X, B..kl>))``.
    """
    X = np.asarray(X, dtype=float)
    B = np.asarray(B, dtype=float)
    n = B.shape[2]
    slack = v * np.eye(n) - row_player_matrix(B, X)
    return min(min_eigenvalue(X), min_eigenvalue(slack), _trace_residual(X))


def membership_Q(Y, u: float, A, tol: float = 1e-8) -> float:
    """Signed residual of ``(Y, u)`` in Q, mirroring :func:`membership_P`."""
    Y = np.asarray(Y, dtype=float)
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    slack = u * np.eye(m) - column_player_matrix(A, Y)
    return min(min_eigenvalue(Y), min_eigenvalue(slack), _trace_residual(Y))


def best_response(A, Y):
    """Player 1's best pure (rank-1) response to ``Y`` and its value."""
    A = np.asarray(A, dtype=float)
    Y = check_strategy(Y, A.shape[2])
    eig = sym_eig(column_player_matrix(A, Y))
    u = eig.eigenvectors[:, 0]
    return np.outer(u, u), float(eig.eigenvalues[0])


def best_response_column(B, X):
    """Player 2's best rank-1 response to ``X`` under payoff tensor ``B``."""
    B = np.asarray(B, dtype=float)
    X = check_strategy(X, B.shape[0])
    eig = sym_eig(row_player_matrix(B, X))
    q = eig.eigenvectors[:, 0]
    return np.outer(q, q), float(eig.eigenvalues[0])


def atom_residuals(M, decomposition: Rank1Decomposition, target: float) -> np.ndarray:
    """``<p p^T, M> - target`` for every atom ``p``."""
    P = decomposition.vectors
    return np.einsum("is,ij,js->s", P, M, P) - target


def nash_gap(game: SemidefiniteGame, X, Y) -> tuple[float, float]:
    """Best-response value minus realized payoff, for player 1 and player 2."""
    X = check_strategy(X, game.m)
    Y = check_strategy(Y, game.n)
    g1 = max_eigenvalue(column_player_matrix(game.A, Y)) - payoff(game.A, X, Y)
    g2 = max_eigenvalue(row_player_matrix(game.B, X)) - payoff(game.B, X, Y)
    return g1, g2


def verify_nash(game: SemidefiniteGame, X, Y, tol: float = 1e-8,
                rank_tol: float = DEFAULT_RANK_TOL, decompositions=None) -> NashCertificate:
    """Certify ``(X, Y)`` against the spectrahedral characterization.

    ``decompositions`` may supply rank-1 decompositions ``(of X, of Y)`` to use
    instead of the spectral ones.
    """
    try:
        X = check_strategy(X, game.m)
        Y = check_strategy(Y, game.n)
    except ContractViolation as exc:
        raise ContractViolation(f"invalid strategy: {exc}") from None
    u = payoff(game.A, X, Y)
    v = payoff(game.B, X, Y)
    if decompositions is None:
        dX, dY = rank1_decompose(X, rank_tol), rank1_decompose(Y, rank_tol)
    else:
        dX, dY = decompositions
    MA = column_player_matrix(game.A, Y)
    MB = row_player_matrix(game.B, X)
    return NashCertificate(
        X=X, Y=Y, u=u, v=v,
        P_residual=membership_P(X, v, game.B, tol),
        Q_residual=membership_Q(Y, u, game.A, tol),
        atom_residuals_X=atom_residuals(MA, dX, u),
        atom_residuals_Y=atom_residuals(MB, dY, v),
        tol=tol,
        gaps=(max_eigenvalue(MA) - u, max_eigenvalue(MB) - v),
    )
