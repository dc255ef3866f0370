"""Independent reference computations used only by the tests.

Nothing here calls into sdgames; every function is a direct transcription of
a definition (explicit loops, vertex enumeration, grid search).
"""

import itertools

import numpy as np


def payoff_loop(A, X, Y):
    m, n = A.shape[0], A.shape[2]
    total = 0.0
    for i in range(m):
        for j in range(m):
            for k in range(n):
                for l in range(n):
                    total += X[i, j] * A[i, j, k, l] * Y[k, l]
    return total


def frobenius_loop(A, B):
    s = 0.0
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            s += A[i, j] * B[i, j]
    return s


def random_sym(rng, n, scale=1.0):
    M = rng.standard_normal((n, n)) * scale
    return (M + M.T) / 2.0


def random_strategy(rng, n, rank=None):
    rank = n if rank is None else rank
    G = rng.standard_normal((n, rank))
    X = G @ G.T
    return X / np.trace(X)


def random_tensor(rng, m, n):
    A = rng.standard_normal((m, m, n, n))
    A = (A + A.transpose(1, 0, 2, 3)) / 2.0
    return (A + A.transpose(0, 1, 3, 2)) / 2.0


def matrix_game_value(M, tol=1e-9):
    """Value of the zero-sum matrix game ``max_x min_y x^T M y`` by support enumeration.

    Tries every pair of equal-size supports, solves the equalizing systems and
    keeps a pair that passes the best-response checks.  Fine for tiny generic games.
    """
    M = np.asarray(M, dtype=float)
    m, n = M.shape
    for k in range(1, min(m, n) + 1):
        for S in itertools.combinations(range(m), k):
            for T in itertools.combinations(range(n), k):
                sub = M[np.ix_(S, T)]
                # x on S: sub^T x = v 1, sum x = 1
                K1 = np.block([[sub.T, -np.ones((k, 1))], [np.ones((1, k)), np.zeros((1, 1))]])
                K2 = np.block([[sub, -np.ones((k, 1))], [np.ones((1, k)), np.zeros((1, 1))]])
                rhs = np.zeros(k + 1)
                rhs[-1] = 1.0
                try:
                    sx = np.linalg.solve(K1, rhs)
                    sy = np.linalg.solve(K2, rhs)
                except np.linalg.LinAlgError:
                    continue
                x = np.zeros(m)
                y = np.zeros(n)
                x[list(S)] = sx[:k]
                y[list(T)] = sy[:k]
                v = sx[-1]
                if x.min() < -tol or y.min() < -tol:
                    continue
                if (x @ M).min() >= v - 1e-9 and (M @ y).max() <= v + 1e-9:
                    return float(v)
    raise RuntimeError("no equilibrium found by support enumeration")


def lp_vertex_min(c, rows, rhs, senses):
    """``min c.x`` subject to ``rows x (>= or =) rhs`` and ``x >= 0`` by enumerating vertices."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    G = [np.asarray(r, dtype=float) for r in rows] + list(np.eye(n))
    h = list(rhs) + [0.0] * n
    eq = [i for i, s in enumerate(senses) if s == "eq"]
    best = np.inf
    for act in itertools.combinations(range(len(G)), n):
        if not set(eq) <= set(act):
            continue
        Gm = np.array([G[i] for i in act])
        if abs(np.linalg.det(Gm)) < 1e-12:
            continue
        x = np.linalg.solve(Gm, np.array([h[i] for i in act]))
        ok = x.min() >= -1e-9
        for r, b, s in zip(rows, rhs, senses):
            val = np.dot(r, x)
            ok &= (abs(val - b) <= 1e-9) if s == "eq" else (val >= b - 1e-9)
        if ok:
            best = min(best, float(c @ x))
    return best


def grid_rank1_max(M, step_deg=0.5):
    """Largest ``u^T M u`` over unit ``u`` on a circle grid; ``M`` is 2 x 2."""
    th = np.deg2rad(np.arange(0.0, 180.0, step_deg))
    U = np.stack([np.cos(th), np.sin(th)])
    return float(np.max(np.einsum("it,ij,jt->t", U, M, U)))


def grid_rank1_min(M, step_deg=0.5):
    return -grid_rank1_max(-np.asarray(M), step_deg)


def lp_game_value(M):
    """Value of ``max_x min_y x^T M y`` through the classical LP after shifting ``M`` positive."""
    M = np.asarray(M, dtype=float)
    s = 1.0 - M.min()
    P = M + s
    # min 1.u  s.t.  P^T u >= 1, u >= 0  has optimum 1 / value(P)
    opt = lp_vertex_min(np.ones(M.shape[0]), list(P.T), [1.0] * M.shape[1], ["geq"] * M.shape[1])
    return 1.0 / opt - s
