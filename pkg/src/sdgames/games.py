"""Payoff tensors, strategies and payoff evaluation for two-player semidefinite games.

A payoff tensor is an ``(m, m, n, n)`` array ``A`` symmetric in its first and
in its last index pair.  Player 1 picks ``X`` in the spectraplex of size ``m``,
player 2 picks ``Y`` of size ``n`` and player 1 receives
``sum_ijkl X_ij A_ijkl Y_kl``.  Indices are zero-based throughout the API.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .symlin import as_sym, min_eigenvalue

STRATEGY_TOL = 1e-8


def payoff_tensor(A) -> np.ndarray:
    """Validate a 4-index array and average it into bisymmetric form."""
    A = np.array(A, dtype=float)
    if A.ndim != 4 or A.shape[0] != A.shape[1] or A.shape[2] != A.shape[3] or 0 in A.shape:
        raise ContractViolation(f"payoff tensor must have shape (m, m, n, n), got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractViolation("payoff tensor has non-finite entries")
    A = (A + A.transpose(1, 0, 2, 3)) / 2.0
    return (A + A.transpose(0, 1, 3, 2)) / 2.0


def is_bisymmetric(A) -> bool:
    A = np.asarray(A)
    return bool(np.array_equal(A, A.transpose(1, 0, 2, 3)) and np.array_equal(A, A.transpose(0, 1, 3, 2)))


def check_strategy(X, dim: int | None = None, tol: float = STRATEGY_TOL) -> np.ndarray:
    """Return ``X`` as a symmetric array after checking it lies in the spectraplex."""
    X = as_sym(X)
    if dim is not None and X.shape[0] != dim:
        raise ContractViolation(f"strategy has dimension {X.shape[0]}, expected {dim}")
    if abs(np.trace(X) - 1.0) > tol:
        raise ContractViolation(f"strategy trace is {np.trace(X)!r}, expected 1")
    lam = min_eigenvalue(X)
    if lam < -tol:
        raise ContractViolation(f"strategy is not PSD (min eigenvalue {lam:.3e})")
    return X


def is_strategy(X, tol: float = STRATEGY_TOL) -> bool:
    try:
        check_strategy(X, tol=tol)
    except ContractViolation:
        return False
    return True


@dataclass(frozen=True)
class SemidefiniteGame:
    A: np.ndarray
    B: np.ndarray
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        A = payoff_tensor(self.A)
        B = payoff_tensor(self.B)
        if A.shape != B.shape:
            raise ContractViolation(f"A has shape {A.shape} but B has shape {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @classmethod
    def zero_sum(cls, A, **kw) -> "SemidefiniteGame":
        A = payoff_tensor(A)
        return cls(A, -A, **kw)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[2]

    @property
    def is_zero_sum(self) -> bool:
        return bool(np.max(np.abs(self.A + self.B)) == 0.0)


def slice_front(A, k: int, l: int) -> np.ndarray:
    """The ``m x m`` matrix ``A[:, :, k, l]``."""
    A = np.asarray(A)
    n = A.shape[2]
    if not (0 <= k < n and 0 <= l < n):
        raise ContractViolation(f"slice index ({k}, {l}) out of range for n={n}")
    return A[:, :, k, l].copy()


def slice_back(A, i: int, j: int) -> np.ndarray:
    """The ``n x n`` matrix ``A[i, j, :, :]``."""
    A = np.asarray(A)
    m = A.shape[0]
    if not (0 <= i < m and 0 <= j < m):
        raise ContractViolation(f"slice index ({i}, {j}) out of range for m={m}")
    return A[i, j, :, :].copy()


def row_player_matrix(A, X) -> np.ndarray:
    """``(<X, A[:, :, k, l]>)_{k,l}``: what each pure response of player 2 is worth once X is fixed."""
    A = np.asarray(A)
    X = np.asarray(X, dtype=float)
    if X.shape != A.shape[:2]:
        raise ContractViolation(f"strategy of shape {X.shape} does not match tensor {A.shape}")
    return np.tensordot(X, A, axes=([0, 1], [0, 1]))


def column_player_matrix(A, Y) -> np.ndarray:
    """``(<A[i, j, :, :], Y>)_{i,j}``."""
    A = np.asarray(A)
    Y = np.asarray(Y, dtype=float)
    if Y.shape != A.shape[2:]:
        raise ContractViolation(f"strategy of shape {Y.shape} does not match tensor {A.shape}")
    return np.tensordot(A, Y, axes=([2, 3], [0, 1]))


def payoff(A, X, Y) -> float:
    """Bilinear payoff ``sum X_ij A_ijkl Y_kl`` computed as ``<(<X, A..kl>), Y>``."""
    return float(np.sum(row_player_matrix(A, X) * np.asarray(Y, dtype=float)))


def embed_bimatrix(Amat, Bmat, name: str = "") -> SemidefiniteGame:
    """Diagonal embedding: ``A[i, i, k, k] = a_ik`` and zero elsewhere."""
    Amat = np.array(Amat, dtype=float)
    Bmat = np.array(Bmat, dtype=float)
    if Amat.ndim != 2 or Amat.shape != Bmat.shape:
        raise ContractViolation("bimatrix payoffs must be matrices of equal shape")
    m, n = Amat.shape
    A = np.zeros((m, m, n, n))
    B = np.zeros((m, m, n, n))
    for i in range(m):
        for k in range(n):
            A[i, i, k, k] = Amat[i, k]
            B[i, i, k, k] = Bmat[i, k]
    return SemidefiniteGame(A, B, name=name)


def is_skew_symmetric_game(A, tol: float = 1e-12) -> bool:
    """True iff ``m == n`` and ``A[i,j,k,l] == -A[k,l,i,j]`` up to ``tol``."""
    A = np.asarray(A)
    if A.shape[0] != A.shape[2]:
        return False
    return bool(np.max(np.abs(A + A.transpose(2, 3, 0, 1))) <= tol)
