"""Small dense semidefinite programming.

Problems are posed over a single symmetric matrix variable ``X``::

    minimize    <C, X>
    subject to  <A_i, X> = b_i   (sense "eq")
                <A_i, X> >= b_i  (sense "geq")
                X PSD

with the dual ``max b^T y s.t. sum_i y_i A_i + S = C, S PSD`` and ``y_i >= 0``
for every "geq" row.  :func:`solve` detects the block-diagonal structure of the
data, turns inequality rows into nonnegative scalar slacks and runs a
homogeneous self-dual primal-dual interior point method with Nesterov-Todd
scaling and a Mehrotra predictor-corrector step.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .symlin import as_sym

DEFAULT_TOL = 1e-8
MAX_ITER = 200
STEP_FRACTION = 0.98
MAX_DIM = 200
MAX_CONSTRAINTS = 2000


class Sense(str, enum.Enum):
    EQ = "eq"
    GEQ = "geq"


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class Constraint:
    A: np.ndarray
    b: float
    sense: Sense = Sense.EQ


@dataclass(frozen=True)
class SdpProblem:
    C: np.ndarray
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        C = as_sym(self.C)
        cons = []
        for c in self.constraints:
            A = as_sym(c.A)
            if A.shape != C.shape:
                raise ContractViolation(f"constraint matrix has shape {A.shape}, objective {C.shape}")
            cons.append(Constraint(A, float(c.b), Sense(c.sense)))
        if not cons:
            raise ContractViolation("an SDP needs at least one constraint")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "constraints", tuple(cons))

    @classmethod
    def from_data(cls, C, As, b, senses=None) -> "SdpProblem":
        if senses is None:
            senses = [Sense.EQ] * len(As)
        elif isinstance(senses, (str, Sense)):
            senses = [senses] * len(As)
        return cls(C, tuple(Constraint(A, bi, s) for A, bi, s in zip(As, b, senses)))

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def As(self) -> list[np.ndarray]:
        return [c.A for c in self.constraints]

    @property
    def b(self) -> np.ndarray:
        return np.array([c.b for c in self.constraints])

    @property
    def senses(self) -> list[Sense]:
        return [c.sense for c in self.constraints]

    @property
    def is_modified_form(self) -> bool:
        return all(s is Sense.GEQ for s in self.senses)

    @property
    def is_standard_form(self) -> bool:
        return all(s is Sense.EQ for s in self.senses)


@dataclass
class SdpSolution:
    status: Status
    X: np.ndarray
    y: np.ndarray
    S: np.ndarray
    primal_obj: float
    dual_obj: float
    primal_residual: float
    dual_residual: float
    rel_gap: float
    iterations: int = 0
    certificate: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def residuals(p: SdpProblem, X, y, S) -> tuple[float, float, float]:
    """Relative primal residual, dual residual and duality gap of a candidate point."""
    X = np.asarray(X, dtype=float)
    S = np.asarray(S, dtype=float)
    y = np.asarray(y, dtype=float)
    b = p.b
    AX = np.array([np.sum(A * X) for A in p.As])
    viol = np.array([
        abs(ax - bi) if s is Sense.EQ else max(0.0, bi - ax)
        for ax, bi, s in zip(AX, b, p.senses)
    ])
    pres = float(np.linalg.norm(viol) / (1.0 + np.linalg.norm(b)))
    R = sum(yi * A for yi, A in zip(y, p.As)) + S - p.C
    sign_viol = np.array([max(0.0, -yi) if s is Sense.GEQ else 0.0 for yi, s in zip(y, p.senses)])
    dres = float(np.hypot(np.linalg.norm(R), np.linalg.norm(sign_viol)) / (1.0 + np.linalg.norm(p.C)))
    pobj = float(np.sum(p.C * X))
    dobj = float(b @ y)
    gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
    return pres, dres, gap


# -- form conversions ---------------------------------------------------------


def to_standard_form(p: SdpProblem) -> SdpProblem:
    """Rewrite every "geq" row as an equality by growing the variable.

    The ``j``-th inequality gets a single extra entry ``-1`` at position
    ``(n + j, n + j)`` of its padded constraint matrix; the objective is padded
    with zeros.  The top-left ``n x n`` block of a solution of the result solves
    ``p``, and the dual vectors coincide.
    """
    n = p.n
    geq = [i for i, s in enumerate(p.senses) if s is Sense.GEQ]
    N = n + len(geq)
    C = np.zeros((N, N))
    C[:n, :n] = p.C
    cons = []
    for i, c in enumerate(p.constraints):
        A = np.zeros((N, N))
        A[:n, :n] = c.A
        if c.sense is Sense.GEQ:
            j = n + geq.index(i)
            A[j, j] = -1.0
        cons.append(Constraint(A, c.b, Sense.EQ))
    return SdpProblem(C, tuple(cons))


def to_modified_form(p: SdpProblem) -> SdpProblem:
    """Rewrite every equality row ``<A, X> = b`` as ``<A, X> >= b`` and ``<-A, X> >= -b``.

    The feasible set is unchanged.  A dual solution of the result maps back by
    ``y_eq = y_plus - y_minus``.
    """
    cons = []
    for c in p.constraints:
        if c.sense is Sense.EQ:
            cons.append(Constraint(c.A, c.b, Sense.GEQ))
            cons.append(Constraint(-c.A, -c.b, Sense.GEQ))
        else:
            cons.append(c)
    return SdpProblem(p.C, tuple(cons))


class BlockLayout:
    """Coordinates of a block-diagonal variable ``diag(Z_1, ..., Z_r)`` inside one big matrix."""

    def __init__(self, sizes):
        sizes = [int(s) for s in sizes]
        if not sizes or min(sizes) < 1:
            raise ContractViolation("block sizes must be a non-empty list of positive integers")
        self.sizes = sizes
        self.offsets = list(np.cumsum([0] + sizes[:-1]))
        self.dim = int(sum(sizes))

    def __len__(self):
        return len(self.sizes)

    def slice(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k] + self.sizes[k])

    def index(self, k: int, i: int = 0, j: int = 0) -> tuple[int, int]:
        if not (0 <= i < self.sizes[k] and 0 <= j < self.sizes[k]):
            raise ContractViolation(f"entry ({i}, {j}) outside block {k} of size {self.sizes[k]}")
        o = self.offsets[k]
        return o + i, o + j

    def embed(self, blocks) -> np.ndarray:
        Z = np.zeros((self.dim, self.dim))
        for k, B in enumerate(blocks):
            Z[self.slice(k), self.slice(k)] = np.reshape(np.asarray(B, dtype=float), (self.sizes[k],) * 2)
        return Z

    def extract(self, Z) -> list[np.ndarray]:
        Z = np.asarray(Z)
        return [Z[self.slice(k), self.slice(k)].copy() for k in range(len(self))]

    def block_matrix(self, k: int, M) -> np.ndarray:
        """Big matrix that is ``M`` on block ``k`` and zero elsewhere."""
        Z = np.zeros((self.dim, self.dim))
        Z[self.slice(k), self.slice(k)] = np.reshape(np.asarray(M, dtype=float), (self.sizes[k],) * 2)
        return Z

    def entry_selector(self, k: int, i: int, j: int) -> np.ndarray:
        """Symmetric ``E`` with ``<E, Z> == Z_k[i, j]`` for every symmetric ``Z``."""
        I, J = self.index(k, i, j)
        E = np.zeros((self.dim, self.dim))
        if I == J:
            E[I, I] = 1.0
        else:
            E[I, J] = E[J, I] = 0.5
        return E


def block_diag_variable_encoding(sizes) -> BlockLayout:
    return BlockLayout(sizes)


# -- interior point internals -------------------------------------------------


class _PsdBlock:
    def __init__(self, A, C):
        self.A = A  # (m, k, k)
        self.C = C
        self.dim = C.shape[0]

    def identity(self):
        return np.eye(self.dim)

    def apply(self, X):
        return np.einsum("ijk,jk->i", self.A, X)

    def adjoint(self, y):
        return np.einsum("i,ijk->jk", y, self.A)

    @staticmethod
    def inner(U, V):
        return float(np.sum(U * V))

    def set_scaling(self, X, S):
        L = _chol(X)
        Linv = np.linalg.inv(L)
        lam2, U = np.linalg.eigh(L.T @ S @ L)
        lam = np.sqrt(np.maximum(lam2, 1e-300))
        self.lam = lam
        self.G = L @ U / np.sqrt(lam)
        self.Ginv = (np.sqrt(lam)[:, None] * U.T) @ Linv
        self.W = self.G @ self.G.T

    def wmul(self, U):
        return self.W @ U @ self.W

    def schur(self):
        WAW = np.einsum("ab,ibc,cd->iad", self.W, self.A, self.W)
        return np.einsum("ijk,ljk->il", self.A, WAW)

    def scaled_primal(self, dX):
        return self.Ginv @ dX @ self.Ginv.T

    def scaled_dual(self, dS):
        return self.G.T @ dS @ self.G

    def target(self, sigma_mu, dXs=None, dSs=None):
        R = sigma_mu * np.eye(self.dim) - np.diag(self.lam**2)
        if dXs is not None:
            P = dXs @ dSs
            R -= (P + P.T) / 2.0
        return R

    def solve_jordan(self, R):
        lam = self.lam
        return 2.0 * R / (lam[:, None] + lam[None, :])

    def unscale(self, E):
        return self.G @ E @ self.G.T

    @staticmethod
    def max_step(X, dX):
        L = _chol(X)
        Linv = np.linalg.inv(L)
        ev = np.linalg.eigvalsh(Linv @ dX @ Linv.T)
        lo = ev[0]
        return np.inf if lo >= 0 else -1.0 / lo


class _LpBlock:
    def __init__(self, A, c):
        self.A = A  # (m, k)
        self.C = c
        self.dim = c.shape[0]

    def identity(self):
        return np.ones(self.dim)

    def apply(self, x):
        return self.A @ x

    def adjoint(self, y):
        return self.A.T @ y

    @staticmethod
    def inner(u, v):
        return float(u @ v)

    def set_scaling(self, x, s):
        self.lam = np.sqrt(x * s)
        self.W = np.sqrt(x / s)
        self.g = np.sqrt(self.W)

    def wmul(self, u):
        return self.W**2 * u

    def schur(self):
        return (self.A * self.W**2) @ self.A.T

    def scaled_primal(self, dx):
        return dx / self.g**2

    def scaled_dual(self, ds):
        return ds * self.g**2

    def target(self, sigma_mu, dxs=None, dss=None):
        r = sigma_mu - self.lam**2
        if dxs is not None:
            r = r - dxs * dss
        return r

    def solve_jordan(self, r):
        return r / self.lam

    def unscale(self, e):
        return self.g**2 * e

    @staticmethod
    def max_step(x, dx):
        neg = dx < 0
        if not np.any(neg):
            return np.inf
        return float(np.min(-x[neg] / dx[neg]))


def _chol(X):
    try:
        return np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh((X + X.T) / 2.0)
        w = np.maximum(w, 1e-300)
        _, R = np.linalg.qr((V * np.sqrt(w)).T)
        L = R.T
        return L * np.where(np.diag(L) < 0, -1.0, 1.0)


def _components(p: SdpProblem) -> list[list[int]]:
    n = p.n
    pattern = np.abs(p.C) > 0
    for A in p.As:
        pattern |= np.abs(A) > 0
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in zip(*np.nonzero(np.triu(pattern, 1))):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]


def _max_dim() -> int:
    env = os.environ.get("SDGAME_MAX_DIM")
    return int(env) if env else MAX_DIM


def solve(p: SdpProblem, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> SdpSolution:
    """Solve ``p`` to relative accuracy ``tol``.

    Infeasible problems are reported through the status together with the
    improving ray that certifies them; a run that does not reach ``tol`` within
    ``max_iter`` iterations ends with ``Status.NUMERICAL_FAILURE``.
    """
    if not (1e-12 <= tol <= 1e-2):
        raise ContractViolation(f"tol must lie in [1e-12, 1e-2], got {tol}")
    if p.n > _max_dim() or p.m > MAX_CONSTRAINTS:
        raise ContractViolation(f"problem size n={p.n}, m={p.m} exceeds the configured caps")

    n, m = p.n, p.m
    b = p.b
    As = np.array(p.As)
    comps = _components(p)
    psd_idx = [c for c in comps if len(c) > 1]
    lp_idx = [c[0] for c in comps if len(c) == 1]
    geq = [i for i, s in enumerate(p.senses) if s is Sense.GEQ]

    blocks = []
    for idx in psd_idx:
        ix = np.ix_(idx, idx)
        blocks.append(_PsdBlock(As[(slice(None),) + ix], p.C[ix]))
    n_lp = len(lp_idx) + len(geq)
    if n_lp:
        A_lp = np.zeros((m, n_lp))
        c_lp = np.zeros(n_lp)
        if lp_idx:
            A_lp[:, : len(lp_idx)] = As[:, lp_idx, lp_idx]
            c_lp[: len(lp_idx)] = p.C[lp_idx, lp_idx]
        for j, i in enumerate(geq):
            A_lp[i, len(lp_idx) + j] = -1.0
        blocks.append(_LpBlock(A_lp, c_lp))

    X, y, S, tau, kappa, it, status, cert = _hsd(blocks, b, tol, max_iter)

    Xf = np.zeros((n, n))
    Sf = np.zeros((n, n))
    for blk, idx, Xb, Sb in zip(blocks, psd_idx, X, S):
        Xf[np.ix_(idx, idx)] = Xb
        Sf[np.ix_(idx, idx)] = Sb
    if lp_idx:
        Xf[lp_idx, lp_idx] = X[-1][: len(lp_idx)]
        Sf[lp_idx, lp_idx] = S[-1][: len(lp_idx)]

    if status is Status.OPTIMAL or status is Status.NUMERICAL_FAILURE:
        Xs, ys, Ss = Xf / tau, y / tau, Sf / tau
    else:
        Xs, ys, Ss = Xf, y, Sf
    pres, dres, gap = residuals(p, Xs, ys, Ss)
    return SdpSolution(
        status=status, X=Xs, y=ys, S=Ss,
        primal_obj=float(np.sum(p.C * Xs)), dual_obj=float(b @ ys),
        primal_residual=pres, dual_residual=dres, rel_gap=gap,
        iterations=it, certificate=cert,
    )


def _hsd(blocks, b, tol, max_iter):
    m = len(b)
    X = [blk.identity() for blk in blocks]
    S = [blk.identity() for blk in blocks]
    y = np.zeros(m)
    tau = kappa = 1.0
    nu = sum(blk.dim for blk in blocks)
    bnorm = 1.0 + np.linalg.norm(b)
    cnorm = 1.0 + np.sqrt(sum(np.sum(blk.C**2) for blk in blocks))

    def A_of(Us):
        return sum(blk.apply(U) for blk, U in zip(blocks, Us))

    def inner_sum(Us, Vs):
        return sum(blk.inner(U, V) for blk, U, V in zip(blocks, Us, Vs))

    status = Status.NUMERICAL_FAILURE
    cert: dict = {}
    it = 0
    for it in range(max_iter + 1):
        rp = A_of(X) - b * tau
        rd = [blk.adjoint(y) + Sb - blk.C * tau for blk, Sb in zip(blocks, S)]
        cx = inner_sum([blk.C for blk in blocks], X)
        by = float(b @ y)
        rg = by - cx - kappa
        mu = (inner_sum(X, S) + tau * kappa) / (nu + 1)

        pres = np.linalg.norm(rp) / tau / bnorm
        dres = np.sqrt(sum(np.sum(r**2) for r in rd)) / tau / cnorm
        gap = abs(cx - by) / tau / (1.0 + abs(cx / tau) + abs(by / tau))
        if pres <= tol and dres <= tol and gap <= tol:
            status = Status.OPTIMAL
            break
        aty_s = [blk.adjoint(y) + Sb for blk, Sb in zip(blocks, S)]
        if by > 0 and np.sqrt(sum(np.sum(r**2) for r in aty_s)) <= tol * by:
            status = Status.PRIMAL_INFEASIBLE
            cert = {"ray": "dual", "objective": by,
                    "residual": float(np.sqrt(sum(np.sum(r**2) for r in aty_s)))}
            break
        ax = A_of(X)
        if cx < 0 and np.linalg.norm(ax) <= tol * -cx:
            status = Status.DUAL_INFEASIBLE
            cert = {"ray": "primal", "objective": cx, "residual": float(np.linalg.norm(ax))}
            break
        if it == max_iter:
            break

        for blk, Xb, Sb in zip(blocks, X, S):
            blk.set_scaling(Xb, Sb)
        M = sum(blk.schur() for blk in blocks)
        WCW = [blk.wmul(blk.C) for blk in blocks]
        h = A_of(WCW)
        g = inner_sum([blk.C for blk in blocks], WCW)

        def direction(R, r_tau, eta):
            base = [blk.unscale(blk.solve_jordan(Rb)) + eta * blk.wmul(rdb)
                    for blk, Rb, rdb in zip(blocks, R, rd)]
            f1 = -eta * rp - A_of(base)
            f2 = -eta * rg + inner_sum([blk.C for blk in blocks], base) + r_tau / tau
            sol = _msolve(M, np.column_stack([f1, h + b]))
            u, v = sol[:, 0], sol[:, 1]
            denom = (b - h) @ v + g + kappa / tau
            dtau = (f2 - (b - h) @ u) / denom
            dy = u + dtau * v
            E = [blk.unscale(blk.solve_jordan(Rb)) for blk, Rb in zip(blocks, R)]
            dS = [-eta * rdb - blk.adjoint(dy) + blk.C * dtau for blk, rdb in zip(blocks, rd)]
            dX = [Eb - blk.wmul(dSb) for blk, Eb, dSb in zip(blocks, E, dS)]
            dkappa = (r_tau - kappa * dtau) / tau
            return dX, dy, dS, dtau, dkappa

        def step_to_boundary(dX, dS, dtau, dkappa):
            a = np.inf
            for blk, Xb, Sb, dXb, dSb in zip(blocks, X, S, dX, dS):
                a = min(a, blk.max_step(Xb, dXb), blk.max_step(Sb, dSb))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        R0 = [blk.target(0.0) for blk in blocks]
        dXa, dya, dSa, dta, dka = direction(R0, -tau * kappa, 1.0)
        aa = min(1.0, step_to_boundary(dXa, dSa, dta, dka))
        mu_a = (inner_sum([Xb + aa * d for Xb, d in zip(X, dXa)], [Sb + aa * d for Sb, d in zip(S, dSa)])
                + (tau + aa * dta) * (kappa + aa * dka)) / (nu + 1)
        sigma = min(1.0, max(0.0, mu_a / mu)) ** 3

        R1 = [blk.target(sigma * mu, blk.scaled_primal(dXb), blk.scaled_dual(dSb))
              for blk, dXb, dSb in zip(blocks, dXa, dSa)]
        r_tau = sigma * mu - tau * kappa - dta * dka
        dX, dy, dS, dt, dk = direction(R1, r_tau, 1.0 - sigma)
        a = min(1.0, STEP_FRACTION * step_to_boundary(dX, dS, dt, dk))
        if not np.isfinite(a) or a < 1e-12:
            break
        X = [Xb + a * d for Xb, d in zip(X, dX)]
        S = [Sb + a * d for Sb, d in zip(S, dS)]
        y = y + a * dy
        tau += a * dt
        kappa += a * dk
        X = [(Xb + Xb.T) / 2.0 if Xb.ndim == 2 else Xb for Xb in X]
        S = [(Sb + Sb.T) / 2.0 if Sb.ndim == 2 else Sb for Sb in S]
    return X, y, S, tau, kappa, it, status, cert


def _msolve(M, rhs):
    try:
        sol = np.linalg.solve(M, rhs)
        if np.all(np.isfinite(sol)):
            return sol
    except np.linalg.LinAlgError:
        pass
    return np.linalg.lstsq(M, rhs, rcond=None)[0]
