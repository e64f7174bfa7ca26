"""Dense simplex solver for low-dimensional LPs with many inequality rows.

``max <c, x> : A x <= b`` with ``x`` free in R^d is solved through its dual
``min <b, y> : A^T y = c, y >= 0``, a standard-form program with only d
equality rows.  That keeps the tableau d-by-m no matter how many inequality
rows the polytope has; the primal optimum is recovered from the simplex
multipliers of the dual.  Bland's rule is used throughout, so the method
cannot cycle.  ``SupportSweep`` evaluates the same LP for many objectives at
once by caching optimal bases (cones of the normal fan) and solving from
scratch only when a direction escapes every cached cone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    GeometryError,
    InfeasibleError,
    LPError,
    UnboundedError,
)
from .geometry import HPolytope, as_vector

FEAS_TOL = 1e-8
OPT_TOL = 1e-9

_PIVOT_TOL = 1e-11
_MAX_PIVOTS = 20000


@dataclass(frozen=True)
class LPResult:
    status: str  # 'optimal' | 'infeasible' | 'unbounded'
    value: float | None
    point: np.ndarray | None


def _bland_step(M, g, f, B, allowed, opt_tol):
    """One simplex pivot; returns ('optimal'|'unbounded'|'pivot', data)."""
    MB = M[:, B]
    try:
        xB = np.linalg.solve(MB, g)
        pi = np.linalg.solve(MB.T, f[B])
    except np.linalg.LinAlgError as e:
        raise LPError("singular simplex basis") from e
    reduced = f - M.T @ pi
    candidates = np.flatnonzero((reduced < -opt_tol) & allowed)
    if candidates.size == 0:
        return "optimal", (xB, pi)
    j = int(candidates[0])  # Bland: lowest eligible index enters
    w = np.linalg.solve(MB, M[:, j])
    pos = np.flatnonzero(w > _PIVOT_TOL)
    if pos.size == 0:
        return "unbounded", (xB, pi)
    ratios = xB[pos] / w[pos]
    theta = float(ratios.min())
    tied = pos[ratios <= theta + 1e-12 * (1.0 + abs(theta))]
    leave = min(tied, key=lambda i: B[i])  # Bland: lowest basic index leaves
    B[leave] = j
    return "pivot", None


def _run_simplex(M, g, f, B, allowed, opt_tol):
    for _ in range(_MAX_PIVOTS):
        status, data = _bland_step(M, g, f, B, allowed, opt_tol)
        if status != "pivot":
            return status, data
    raise LPError("simplex pivot limit exceeded")


def _solve_standard(M, g, f, feas_tol=FEAS_TOL, opt_tol=OPT_TOL):
    """Two-phase simplex for ``min <f, z> : M z = g, z >= 0``.

    Returns ``(status, value, pi, basis)`` where ``pi`` are the optimal
    multipliers of the equality rows and ``basis`` the final column basis
    (entries >= n are leftover artificials stuck at level zero in redundant
    rows).  Status is 'optimal', 'infeasible' or 'unbounded'.
    """
    r, n = M.shape
    signs = np.where(g >= 0.0, 1.0, -1.0)
    M1 = np.hstack([M, np.diag(signs)])
    f1 = np.concatenate([np.zeros(n), np.ones(r)])
    B = list(range(n, n + r))
    allowed = np.ones(n + r, dtype=bool)

    status, (xB, _) = _run_simplex(M1, g, f1, B, allowed, opt_tol)
    if status != "optimal":  # phase one is bounded below by zero
        raise LPError("phase-one simplex reported unbounded")
    if float(f1[B] @ xB) > feas_tol:
        return "infeasible", None, None, B

    # Drive leftover artificials out of the basis where possible; a row whose
    # artificial cannot leave is redundant and the artificial stays at zero.
    for pos in range(r):
        if B[pos] < n:
            continue
        MB = M1[:, B]
        row = np.linalg.solve(MB.T, np.eye(r)[pos]) @ M
        in_basis = set(B)
        for j in np.flatnonzero(np.abs(row) > 1e-9):
            if int(j) not in in_basis:
                B[pos] = int(j)
                break

    f2 = np.concatenate([f, np.zeros(r)])
    allowed = np.concatenate([np.ones(n, dtype=bool), np.zeros(r, dtype=bool)])
    status, (xB, pi) = _run_simplex(M1, g, f2, B, allowed, opt_tol)
    if status == "unbounded":
        return "unbounded", None, None, B
    return "optimal", float(f2[B] @ xB), pi, B


def _lp_maximize_arrays(c, A, b, feas_tol, opt_tol):
    status, _, pi, _ = _solve_standard(A.T, c, b, feas_tol, opt_tol)
    if status == "infeasible":
        # The dual has no feasible point: the primal is unbounded when it is
        # feasible at all.
        if _feasible_arrays(A, b, feas_tol, opt_tol):
            return LPResult("unbounded", None, None)
        return LPResult("infeasible", None, None)
    if status == "unbounded":
        return LPResult("infeasible", None, None)
    x = pi.copy()
    return LPResult("optimal", float(c @ x), x)


def _feasible_arrays(A, b, feas_tol, opt_tol):
    # Farkas form: A x <= b is feasible iff min <b, y> over the cone
    # {A^T y = 0, y >= 0} is zero rather than unbounded below.
    status, value, _, _ = _solve_standard(A.T, np.zeros(A.shape[1]), b, feas_tol, opt_tol)
    if status == "unbounded":
        return False
    if status != "optimal":
        raise LPError("feasibility probe failed")
    return value >= -feas_tol


def lp_maximize(objective, P: HPolytope, *, feas_tol: float = FEAS_TOL,
                opt_tol: float = OPT_TOL) -> LPResult:
    """Maximize a linear objective over an H-polytope.

    Detects infeasibility and unboundedness; on success the returned point
    satisfies every constraint within ``feas_tol``.
    """
    c = as_vector(objective, P.dim)
    return _lp_maximize_arrays(c, P.A, P.b, feas_tol, opt_tol)


def lp_feasible(P: HPolytope, *, feas_tol: float = FEAS_TOL,
                opt_tol: float = OPT_TOL) -> bool:
    """True iff the polytope is nonempty (phase-one style certificate)."""
    return _feasible_arrays(P.A, P.b, feas_tol, opt_tol)


def _check_bounded(P: HPolytope, feas_tol, opt_tol):
    e = np.eye(P.dim)
    for i in range(P.dim):
        for sgn in (1.0, -1.0):
            res = _lp_maximize_arrays(sgn * e[i], P.A, P.b, feas_tol, opt_tol)
            if res.status == "unbounded":
                raise UnboundedError(f"polytope unbounded along coordinate {i}")
            if res.status == "infeasible":
                raise InfeasibleError("polytope is empty")


def chebyshev_center(P: HPolytope, *, feas_tol: float = FEAS_TOL,
                     opt_tol: float = OPT_TOL) -> tuple[np.ndarray, float]:
    """Center and radius of a largest inscribed ball of a bounded polytope.

    The radius is unique; the center is one optimal choice.  Raises for empty
    or unbounded input.
    """
    _check_bounded(P, feas_tol, opt_tol)
    d = P.dim
    # Maximize r subject to  <a_i, x> + |a_i| r <= b_i  and  r >= 0.
    norms = np.linalg.norm(P.A, axis=1)
    A_aug = np.vstack([
        np.hstack([P.A, norms[:, None]]),
        np.concatenate([np.zeros(d), [-1.0]])[None, :],
    ])
    b_aug = np.concatenate([P.b, [0.0]])
    c_aug = np.concatenate([np.zeros(d), [1.0]])
    res = _lp_maximize_arrays(c_aug, A_aug, b_aug, feas_tol, opt_tol)
    if res.status != "optimal":
        raise InfeasibleError("polytope is empty")
    return res.point[:d].copy(), float(res.value)


class SupportSweep:
    """Support values ``h_P(u) = max_{x in P} <u, x>`` for many directions.

    Each optimal simplex basis corresponds to a vertex of P together with the
    cone of directions it maximizes.  Bases discovered so far are cached and
    tested in bulk; only directions outside every cached cone pay for a full
    simplex solve.  Values are identical to per-direction ``lp_maximize``
    results, and the evaluation order is deterministic.
    """

    _CONE_BLOCK = 64

    def __init__(self, P: HPolytope, *, feas_tol: float = FEAS_TOL,
                 opt_tol: float = OPT_TOL, cone_tol: float = 1e-9):
        self.P = P
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.cone_tol = cone_tol
        self._W: list[np.ndarray] = []  # inverse of A[B]^T per cached basis
        self._pi: list[np.ndarray] = []  # vertex maximized by the cone
        self._hits = np.zeros(0, dtype=np.int64)

    def _cold_value(self, u: np.ndarray) -> float:
        A, b = self.P.A, self.P.b
        status, _, pi, basis = _solve_standard(A.T, u, b, self.feas_tol, self.opt_tol)
        if status == "infeasible":
            raise UnboundedError("polytope unbounded; support value does not exist")
        if status == "unbounded":
            raise InfeasibleError("polytope is empty")
        real = [j for j in basis if j < A.shape[0]]
        if len(real) == A.shape[1]:
            T = A[real].T
            try:
                W = np.linalg.inv(T)
                self._W.append(W)
                self._pi.append(pi.copy())
                self._hits = np.append(self._hits, 0)
            except np.linalg.LinAlgError:
                pass
        return float(pi @ u)

    def _stacks(self):
        order = np.argsort(-self._hits, kind="stable")
        return (np.asarray(self._W)[order], np.asarray(self._pi)[order], order)

    def values(self, U: np.ndarray, chunk: int = 8192) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        if U.ndim != 2 or U.shape[1] != self.P.dim:
            raise DimensionMismatchError("direction batch has wrong shape")
        out = np.empty(len(U))
        for lo in range(0, len(U), chunk):
            block = U[lo:lo + chunk]
            vals = np.full(len(block), np.nan)
            pending = np.arange(len(block))
            if self._W:
                W_stack, pi_stack, order = self._stacks()
                k_total = len(order)
                for cb in range(0, k_total, self._CONE_BLOCK):
                    W_part = W_stack[cb:cb + self._CONE_BLOCK]
                    pi_part = pi_stack[cb:cb + self._CONE_BLOCK]
                    Y = np.einsum("kde,ne->nkd", W_part, block[pending])
                    inside = (Y >= -self.cone_tol).all(axis=2)
                    first = inside.argmax(axis=1)
                    hit = inside.any(axis=1)
                    rows = pending[hit]
                    if rows.size:
                        vals[rows] = np.einsum("nd,nd->n", pi_part[first[hit]], block[rows])
                        np.add.at(self._hits, order[cb + first[hit]], 1)
                    pending = pending[~hit]
                    if pending.size == 0:
                        break
            # Cold directions: solve one, then sweep its new cone over the
            # rest so each basis is discovered (and paid for) only once.
            while pending.size:
                before = len(self._W)
                vals[pending[0]] = self._cold_value(block[pending[0]])
                rest = pending[1:]
                if len(self._W) > before:
                    self._hits[-1] += 1
                    if rest.size:
                        Y = np.einsum("de,ne->nd", self._W[-1], block[rest])
                        inside = (Y >= -self.cone_tol).all(axis=1)
                        rows = rest[inside]
                        if rows.size:
                            vals[rows] = block[rows] @ self._pi[-1]
                            self._hits[-1] += rows.size
                        rest = rest[~inside]
                pending = rest
            out[lo:lo + chunk] = vals
        return out

    def value(self, u) -> float:
        return float(self.values(np.asarray(u, dtype=float)[None, :])[0])
