"""Dense symmetric linear algebra used throughout the package.

Symmetric matrices are plain ``numpy`` arrays; :func:`as_sym` is the single
entry point that validates and symmetrizes them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericalFailure

DEFAULT_RANK_TOL = 1e-8
JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12


def as_sym(M) -> np.ndarray:
    """Return ``(M + M.T) / 2`` as a float array, checking shape and finiteness."""
    M = np.array(M, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ContractViolation(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ContractViolation("matrix has non-finite entries")
    return (M + M.T) / 2.0


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # non-increasing
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.T


def _off(M: np.ndarray) -> float:
    # summed directly; subtracting the diagonal from the full norm cancels badly
    return float(np.sqrt(np.sum((M - np.diag(np.diag(M))) ** 2)))


def sym_eig(M) -> EigenDecomposition:
    """Eigendecomposition by cyclic Jacobi rotations.

    Eigenvalues come out in non-increasing order and each eigenvector is
    signed so that its first nonzero component is positive.
    """
    A = as_sym(M)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    threshold = JACOBI_REL_TOL * scale
    sweeps = 0
    while _off(A) > threshold:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NumericalFailure(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    for k in range(n):
        col = V[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            V[:, k] = -col
    return EigenDecomposition(w, V)


def min_eigenvalue(M) -> float:
    return float(sym_eig(M).eigenvalues[-1])


def max_eigenvalue(M) -> float:
    return float(sym_eig(M).eigenvalues[0])


def is_psd(M, tol: float = 1e-9) -> bool:
    if tol < 0:
        raise ContractViolation("tol must be nonnegative")
    return min_eigenvalue(M) >= -tol


def frobenius(A, B) -> float:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ContractViolation(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.sum(A * B))


def tril_indices_colwise(n: int) -> list[tuple[int, int]]:
    """Lower-triangle positions ordered column by column: (0,0), (1,0), ..., (n-1,n-1)."""
    return [(i, j) for j in range(n) for i in range(j, n)]


def lvec(S) -> np.ndarray:
    """Flatten with doubled off-diagonals, (s11, 2 s21, ..., 2 sn1, s22, ..., snn)."""
    S = as_sym(S)
    n = S.shape[0]
    return np.array([S[i, j] if i == j else 2.0 * S[i, j] for i, j in tril_indices_colwise(n)])


def tri(M) -> np.ndarray:
    """Lower triangle of ``M`` in the same order as :func:`lvec`, without doubling."""
    M = as_sym(M)
    return np.array([M[i, j] for i, j in tril_indices_colwise(M.shape[0])])


def unlvec(v, n: int) -> np.ndarray:
    """Inverse of :func:`lvec`."""
    v = np.asarray(v, dtype=float)
    idx = tril_indices_colwise(n)
    if v.shape != (len(idx),):
        raise ContractViolation(f"expected a vector of length {len(idx)}")
    S = np.zeros((n, n))
    for val, (i, j) in zip(v, idx):
        if i == j:
            S[i, i] = val
        else:
            S[i, j] = S[j, i] = val / 2.0
    return S


def untri(v, n: int) -> np.ndarray:
    """Inverse of :func:`tri`."""
    v = np.asarray(v, dtype=float)
    S = np.zeros((n, n))
    for val, (i, j) in zip(v, tril_indices_colwise(n)):
        S[i, j] = S[j, i] = val
    return S


@dataclass(frozen=True)
class Rank1Decomposition:
    weights: np.ndarray  # positive, sums to one
    vectors: np.ndarray  # unit columns

    def __len__(self) -> int:
        return len(self.weights)

    def atoms(self):
        for k, w in enumerate(self.weights):
            p = self.vectors[:, k]
            yield float(w), p

    def matrix(self) -> np.ndarray:
        P = self.vectors
        return (P * self.weights) @ P.T


def rank1_decompose(X, rank_tol: float = DEFAULT_RANK_TOL, check_tol: float = 1e-8) -> Rank1Decomposition:
    """Convex combination of unit-trace rank-1 matrices taken from the spectral decomposition."""
    X = as_sym(X)
    if abs(np.trace(X) - 1.0) > check_tol:
        raise ContractViolation(f"trace is {np.trace(X)!r}, expected 1")
    eig = sym_eig(X)
    if eig.eigenvalues[-1] < -check_tol:
        raise ContractViolation(f"matrix is not PSD (min eigenvalue {eig.eigenvalues[-1]:.3e})")
    keep = eig.eigenvalues > rank_tol
    w = eig.eigenvalues[keep]
    P = eig.eigenvectors[:, keep]
    return Rank1Decomposition(w / w.sum(), P)


def eigenspaces(eig: EigenDecomposition, tol: float = 1e-8) -> list[np.ndarray]:
    """Group eigenvector indices whose eigenvalues lie within ``tol`` of each other."""
    groups: list[list[int]] = []
    for k, lam in enumerate(eig.eigenvalues):
        if groups and abs(eig.eigenvalues[groups[-1][-1]] - lam) <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return [np.array(g) for g in groups]


def rotated_rank1_decomposition(X, rng: np.random.Generator, rank_tol: float = DEFAULT_RANK_TOL,
                                degeneracy_tol: float = 1e-8) -> Rank1Decomposition:
    """Spectral decomposition with every degenerate eigenspace re-mixed by a random rotation.

    The result is another valid rank-1 decomposition of ``X``.
    """
    X = as_sym(X)
    eig = sym_eig(X)
    V = eig.eigenvectors.copy()
    for g in eigenspaces(eig, degeneracy_tol):
        if len(g) > 1 and eig.eigenvalues[g[0]] > rank_tol:
            Q, R = np.linalg.qr(rng.standard_normal((len(g), len(g))))
            Q = Q * np.sign(np.diag(R))
            V[:, g] = V[:, g] @ Q
    keep = eig.eigenvalues > rank_tol
    w = eig.eigenvalues[keep]
    return Rank1Decomposition(w / w.sum(), V[:, keep])
