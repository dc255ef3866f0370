"""The semidefinite Dantzig game of an SDP and what its solutions say about the SDP.

For a problem ``min <C, X>`` subject to ``<A_i, X> >= b_i`` and ``X`` PSD, the game is played
on block strategies ``diag(y, X, t)``.  In flattened form a strategy is the vector
``z = (y, x, t)`` where ``x`` lists the lower triangle of ``X`` without doubling,
and the payoff matrix

    Q = [[0, Q1, Q2], [-Q1^T, 0, Q3], [-Q2^T, -Q3^T, 0]]

has ``lvec(A_i)`` as the rows of ``Q1``, ``-b`` as ``Q2`` and ``lvec(C)`` as ``Q3``.
The doubled flattening on the payoff side and the plain one on the strategy side
make ``lvec(S) . x == <S, X>``.  Row ``p`` of ``Q z`` is the payoff of the opponent's
coordinate ``p``, so a solution is a strategy with ``Q z`` "nonnegative" blockwise:
``Q z`` must be ``>= 0`` on the two scalar parts and PSD on the matrix part.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .errors import ContractViolation, NumericalFailure
from .symlin import as_sym, min_eigenvalue

TBAR_THRESHOLD = 1e-6
ORDERS = ("diag-first", "column")


def flat_positions(n: int, order: str = "diag-first") -> list[tuple[int, int]]:
    """Lower-triangle positions in flattening order.

    ``"column"`` runs column by column, ``(0,0), (1,0), ..., (n-1,n-1)``.
    ``"diag-first"`` lists the diagonal first and then the strict lower
    triangle column by column; for ``n = 2`` that is ``(0,0), (1,1), (1,0)``.
    """
    if order == "column":
        return [(i, j) for j in range(n) for i in range(j, n)]
    if order == "diag-first":
        return [(i, i) for i in range(n)] + [(i, j) for j in range(n) for i in range(j + 1, n)]
    raise ContractViolation(f"unknown flattening order {order!r}; expected one of {ORDERS}")


def flatten(S, order: str = "diag-first", double: bool = True) -> np.ndarray:
    S = as_sym(S)
    w = 2.0 if double else 1.0
    return np.array([S[i, j] if i == j else w * S[i, j] for i, j in flat_positions(S.shape[0], order)])


def unflatten(v, n: int, order: str = "diag-first", doubled: bool = True) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    pos = flat_positions(n, order)
    if v.shape != (len(pos),):
        raise ContractViolation(f"expected a vector of length {len(pos)}, got shape {v.shape}")
    w = 0.5 if doubled else 1.0
    S = np.zeros((n, n))
    for val, (i, j) in zip(v, pos):
        if i == j:
            S[i, i] = val
        else:
            S[i, j] = S[j, i] = w * val
    return S


def _tri_size(k: int) -> int:
    n = int(round((np.sqrt(8 * k + 1) - 1) / 2))
    if n * (n + 1) // 2 != k or n < 1:
        raise ContractViolation(f"{k} is not a triangular number n(n+1)/2")
    return n


@dataclass(frozen=True)
class DantzigGame:
    Q: np.ndarray
    m: int
    n: int
    order: str = "diag-first"

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        d = self.m + self.n * (self.n + 1) // 2 + 1
        if Q.shape != (d, d):
            raise ContractViolation(f"Q must be {d} x {d} for m={self.m}, n={self.n}; got {Q.shape}")
        if not np.all(np.isfinite(Q)) or not np.array_equal(Q, -Q.T):
            raise ContractViolation("Q must be finite and exactly skew-symmetric")
        flat_positions(self.n, self.order)
        object.__setattr__(self, "Q", Q)

    @property
    def blocks(self) -> tuple[int, int, int]:
        return self.m, self.n * (self.n + 1) // 2, 1

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    @classmethod
    def from_blocks(cls, Q, blocks, order: str = "diag-first") -> "DantzigGame":
        m, k, one = (int(b) for b in blocks)
        if one != 1:
            raise ContractViolation("the last block of a Dantzig game has size 1")
        return cls(Q, m, _tri_size(k), order)

    def split(self):
        """The blocks ``(Q1, Q2, Q3)``."""
        m, k = self.m, self.blocks[1]
        return self.Q[:m, m:m + k], self.Q[:m, -1], self.Q[m:m + k, -1]

    def strategy_vector(self, y, X, t) -> np.ndarray:
        return np.concatenate([np.asarray(y, dtype=float).ravel(),
                               flatten(X, self.order, double=False), [float(t)]])

    def image(self, y, X, t):
        """``Q z`` split into ``(vector on y, matrix on X, scalar on t)``."""
        g = self.Q @ self.strategy_vector(y, X, t)
        m, k = self.m, self.blocks[1]
        return g[:m], unflatten(g[m:m + k], self.n, self.order), float(g[-1])

    def payoff(self, z, w) -> float:
        """Payoff to the player choosing flattened strategy ``z`` against ``w``."""
        return float(np.asarray(w, dtype=float) @ self.Q @ np.asarray(z, dtype=float))


def build_dantzig_game(p: sdp.SdpProblem, order: str = "diag-first") -> DantzigGame:
    if not p.is_modified_form:
        raise ContractViolation("the Dantzig game needs an SDP whose constraints are all 'geq'; "
                                "convert equalities first")
    m, n = p.m, p.n
    k = n * (n + 1) // 2
    Q1 = np.array([flatten(A, order) for A in p.As]).reshape(m, k)
    Q2 = -p.b
    Q3 = flatten(p.C, order)
    d = m + k + 1
    Q = np.zeros((d, d))
    Q[:m, m:m + k] = Q1
    Q[:m, -1] = Q2
    Q[m:m + k, -1] = Q3
    Q = Q - Q.T
    return DantzigGame(Q, m, n, order)


@dataclass
class GameSolution:
    y_bar: np.ndarray
    X_bar: np.ndarray
    t_bar: float
    value: float = 0.0
    solver: sdp.SdpSolution | None = None

    def block_matrix(self) -> np.ndarray:
        """Unflattened strategy ``diag(y_1, ..., y_m, X, t)``."""
        m = len(self.y_bar)
        L = sdp.BlockLayout([1] * m + [self.X_bar.shape[0], 1])
        return L.embed(list(self.y_bar) + [self.X_bar, self.t_bar])


def _symmetric_game_sdp(g: DantzigGame):
    """``min -v`` over block strategies whose image ``Q z`` dominates ``v`` blockwise.

    ``v`` enters as ``w - K`` with ``w >= 0``.  The optimal ``v`` is zero, so
    any ``K > 0`` keeps the optimum; splitting a free ``v`` into two signs
    instead lets the pair drift and stalls the solver.
    """
    m, n = g.m, g.n
    K = 1.0
    sizes = [1] * m + [n, 1] + [1] * m + [n, 1] + [1]
    L = sdp.BlockLayout(sizes)
    bx, bt = m, m + 1
    off = m + 2
    bw, br, bv = off + m, off + m + 1, off + m + 2
    pos = flat_positions(n, g.order)
    sel = [L.entry_selector(i, 0, 0) for i in range(m)]
    sel += [L.entry_selector(bx, r, c) for r, c in pos]
    sel.append(L.entry_selector(bt, 0, 0))
    sel = np.array(sel)
    G = np.tensordot(g.Q, sel, axes=(1, 0))  # <G[p], Z> = (Q z)_p
    w = L.block_matrix(bv, 1.0)
    cons = []
    for i in range(m):
        cons.append(sdp.Constraint(G[i] - w - L.block_matrix(off + i, 1.0), -K))
    for p, (r, c) in enumerate(pos):
        if r == c:
            cons.append(sdp.Constraint(G[m + p] - w - L.entry_selector(bw, r, c), -K))
        else:
            cons.append(sdp.Constraint(0.5 * G[m + p] - L.entry_selector(bw, r, c), 0.0))
    cons.append(sdp.Constraint(G[-1] - w - L.block_matrix(br, 1.0), -K))
    cons.append(sdp.Constraint(sum(L.block_matrix(j, np.eye(L.sizes[j])) for j in range(m + 2)), 1.0))
    return sdp.SdpProblem(-w, tuple(cons)), L, K


def solve_symmetric_game(g: DantzigGame, tol: float = sdp.DEFAULT_TOL) -> GameSolution:
    """A solution ``diag(y, X, t)`` of the symmetric game, i.e. one with ``Q z`` blockwise nonnegative.

    Posed as the max-min SDP of the game, whose value is zero; unlike a pure
    feasibility problem this one has strictly feasible points.
    """
    m, n = g.m, g.n
    total = m + n + 1
    if not np.any(g.Q):
        return GameSolution(np.full(m, 1.0 / total), np.eye(n) / total, 1.0 / total, 0.0, None)
    prob, L, K = _symmetric_game_sdp(g)
    # solved tighter than ``tol`` when possible so the checks at ``tol`` have headroom;
    # the interior point method can lose accuracy near 1e-10, so fall back step by step
    for t in (tol * 1e-2, tol * 1e-1, tol):
        sol = sdp.solve(prob, min(max(t, 1e-12), 1e-2))
        if sol.optimal:
            break
    if not sol.optimal:
        raise NumericalFailure(f"symmetric game SDP ended with status {sol.status.value}")
    parts = L.extract(sol.X)
    y = np.array([parts[i][0, 0] for i in range(m)])
    X = as_sym(parts[m])
    t = float(parts[m + 1][0, 0])
    v = float(parts[-1][0, 0]) - K
    # the solution conditions are homogeneous, so rescaling only tightens the normalization
    total = y.sum() + np.trace(X) + t
    y, X, t = y / total, X / total, t / total
    return GameSolution(y, X, t, v, sol)


def verify_game_solution(sol: GameSolution, p: sdp.SdpProblem, tol: float = 1e-8) -> dict:
    """Signed residuals of the solution conditions, all ``>= -tol`` iff it passes.

    Keys: ``primal`` (min over i of ``<A_i, X> - b_i t``), ``dual``
    (``lambda_min(-sum y_j A_j + t C)``), ``gap`` (``b^T y - <C, X>``), the
    strategy conditions ``y``, ``X``, ``t`` and ``trace`` (``-|1^T y + tr X + t - 1|``),
    plus ``passed``.
    """
    y = np.asarray(sol.y_bar, dtype=float)
    X = as_sym(sol.X_bar)
    t = float(sol.t_bar)
    if y.shape != (p.m,) or X.shape != (p.n, p.n):
        raise ContractViolation("game solution does not match the SDP dimensions")
    As, b, C = p.As, p.b, p.C
    prim = np.array([np.sum(A * X) for A in As]) - b * t
    D = t * C - sum(yj * A for yj, A in zip(y, As))
    out = {
        "primal": float(prim.min()),
        "dual": min_eigenvalue(D),
        "gap": float(b @ y - np.sum(C * X)),
        "y": float(y.min()),
        "X": min_eigenvalue(X),
        "t": t,
        "trace": -abs(float(y.sum() + np.trace(X) + t - 1.0)),
    }
    out["passed"] = all(val >= -tol for val in out.values())
    return out


class Case(str, enum.Enum):
    OPTIMAL_PAIR = "OptimalPair"
    INFEASIBLE_SOMEWHERE = "InfeasibleSomewhere"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Extraction:
    case: Case
    t_bar: float
    gap: float
    X: np.ndarray | None = None
    y: np.ndarray | None = None
    S: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"case": self.case.value, "t_bar": self.t_bar, "gap": self.gap}
        if self.case is Case.OPTIMAL_PAIR:
            d.update(X=self.X.tolist(), y=self.y.tolist(), S=self.S.tolist())
        d["residuals"] = self.residuals
        return d


def extract_sdp_solution(sol: GameSolution, p: sdp.SdpProblem, tol: float = 1e-8,
                         threshold: float = TBAR_THRESHOLD) -> Extraction:
    """Read the trichotomy off a game solution.

    ``t > threshold`` gives an optimal primal-dual pair ``(X / t, y / t, S)``;
    a positive gap with ``t <= threshold`` means the primal or the dual is
    infeasible; anything else is reported as inconclusive.
    """
    res = verify_game_solution(sol, p, tol)
    if not res["passed"]:
        bad = {k: v for k, v in res.items() if k != "passed" and v < -tol}
        raise ContractViolation(f"not a solution of the Dantzig game: {bad}")
    t = float(sol.t_bar)
    gap = res["gap"]
    if t > threshold:
        X = as_sym(sol.X_bar) / t
        y = np.asarray(sol.y_bar, dtype=float) / t
        S = p.C - sum(yj * A for yj, A in zip(y, p.As))
        return Extraction(Case.OPTIMAL_PAIR, t, gap, X, y, S, res)
    if gap > threshold:
        return Extraction(Case.INFEASIBLE_SOMEWHERE, t, gap, residuals=res)
    return Extraction(Case.INCONCLUSIVE, t, gap, residuals=res)
