"""Euclidean projection onto convex bodies.

Balls are projected in closed form.  For vertex-represented polytopes the
minimum-norm point of the translated hull is found with Wolfe's active-set
method: a major cycle adds the vertex that most violates optimality, minor
cycles restore the corral (an affinely independent support set whose affine
minimizer has positive weights).  The affine subproblem is a bordered Gram
solve; if that system becomes ill-conditioned the call falls back to
Frank-Wolfe with away steps, which needs no linear solves.

Every result carries a Wolfe-dual optimality certificate
``max_v <q - p, v - p> <= tol * |q - p|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProjectionError
from .geometry import Ball, VPolytope, as_vector
from .utils import resolve_workers, thread_map

DEFAULT_TOL = 1e-9

_COND_LIMIT = 1e12
_WEIGHT_EPS = 1e-12


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    distance: float
    gap_certificate: float


class _IllConditioned(Exception):
    pass


def _affine_minimizer(S: np.ndarray) -> np.ndarray:
    """Weights of the norm minimizer over the affine hull of the rows of S.

    Solves the bordered system [[0, 1^T], [1, S S^T]] (mu, w) = (1, 0).
    """
    k = len(S)
    M = np.empty((k + 1, k + 1))
    M[0, 0] = 0.0
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = S @ S.T
    if np.linalg.cond(M) > _COND_LIMIT:
        raise _IllConditioned
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    sol = np.linalg.solve(M, rhs)
    return sol[1:]


def _wolfe_min_norm(P: np.ndarray, tol: float):
    """Minimum-norm point of conv(rows of P); returns (z, gap)."""
    n, d = P.shape
    scale2 = float(np.max(np.einsum("ij,ij->i", P, P))) + 1.0
    gap_floor = 1e-14 * scale2

    start = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    idx = [start]
    lam = np.array([1.0])
    z = P[start].copy()

    for _ in range(16 * n + 64):
        dots = P @ z
        j = int(np.argmin(dots))
        gap = float(z @ z - dots[j])
        if gap <= max(tol * np.linalg.norm(z), gap_floor):
            return z, max(gap, 0.0)
        if j in idx:
            # No vertex improves but the gap has not closed: numerical stall.
            raise _IllConditioned
        idx.append(j)
        lam = np.append(lam, 0.0)

        while True:
            S = P[idx]
            w = _affine_minimizer(S)
            if np.all(w > _WEIGHT_EPS):
                lam = w
                z = w @ S
                break
            shrink = lam - w
            mask = (w <= _WEIGHT_EPS) & (shrink > 0)
            if not np.any(mask):
                # Weights already feasible up to tolerance: clamp and accept.
                lam = np.maximum(w, 0.0)
                lam = lam / lam.sum()
                z = lam @ S
                break
            theta = float(np.min(lam[mask] / shrink[mask]))
            theta = min(max(theta, 0.0), 1.0)
            lam = lam + theta * (w - lam)
            lam[lam < _WEIGHT_EPS] = 0.0
            keep = np.flatnonzero(lam > 0.0)
            if keep.size == 0:  # safeguard, should not happen
                keep = np.array([int(np.argmax(lam))])
            idx = [idx[i] for i in keep]
            lam = lam[keep]
            lam = lam / lam.sum()
            z = lam @ P[idx]
    raise _IllConditioned


def _frank_wolfe_min_norm(P: np.ndarray, tol: float):
    """Away-step Frank-Wolfe fallback; no linear solves, linear convergence."""
    n, d = P.shape
    scale2 = float(np.max(np.einsum("ij,ij->i", P, P))) + 1.0
    gap_floor = 1e-14 * scale2

    lam = np.zeros(n)
    start = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    lam[start] = 1.0
    z = P[start].copy()

    for _ in range(500_000):
        dots = P @ z
        s = int(np.argmin(dots))
        gap = float(z @ z - dots[s])
        if gap <= max(tol * np.linalg.norm(z), gap_floor):
            break
        active = np.flatnonzero(lam > 0)
        a = int(active[np.argmax(dots[active])])
        fw_score = gap
        away_score = float(dots[a] - z @ z)
        if fw_score >= away_score:
            direction = P[s] - z
            gamma_max = 1.0
            to = s
            away = None
        else:
            direction = z - P[a]
            gamma_max = lam[a] / (1.0 - lam[a]) if lam[a] < 1.0 else 1.0
            to = None
            away = a
        denom = float(direction @ direction)
        if denom <= 0.0:
            break
        gamma = min(max(-float(z @ direction) / denom, 0.0), gamma_max)
        if gamma == 0.0:
            break
        if to is not None:
            lam *= 1.0 - gamma
            lam[to] += gamma
        else:
            lam *= 1.0 + gamma
            lam[away] -= gamma
            lam[away] = max(lam[away], 0.0)
        lam /= lam.sum()
        z = lam @ P
    dots = P @ z
    gap = float(z @ z - dots.min())
    return z, max(gap, 0.0)


def _project_polytope(body: VPolytope, q: np.ndarray, tol: float) -> ProjectionResult:
    P = body.vertices - q
    try:
        z, gap = _wolfe_min_norm(P, tol)
    except _IllConditioned:
        z, gap = _frank_wolfe_min_norm(P, tol)
    dist = float(np.linalg.norm(z))
    scale = float(np.sqrt(np.max(np.einsum("ij,ij->i", P, P)))) + 1.0
    if dist <= 1e-12 * scale:
        return ProjectionResult(q.copy(), 0.0, 0.0)
    return ProjectionResult(q + z, dist, gap)


def project(body, q, tol: float = DEFAULT_TOL) -> ProjectionResult:
    """Nearest point of a convex body; exact for balls, Wolfe for polytopes.

    The returned point always lies in the body (it is a convex combination of
    vertices, or the ball's boundary point).
    """
    if tol <= 0:
        raise ProjectionError("tol must be positive")
    q = as_vector(q, body.dim)
    if isinstance(body, Ball):
        w = q - body.center
        dist = float(np.linalg.norm(w))
        if dist <= body.radius:
            return ProjectionResult(q.copy(), 0.0, 0.0)
        p = body.center + body.radius * (w / dist)
        return ProjectionResult(p, dist - body.radius, 0.0)
    if isinstance(body, VPolytope):
        return _project_polytope(body, q, tol)
    raise ProjectionError(f"cannot project onto {type(body).__name__}")


def project_batch(body, queries, tol: float = DEFAULT_TOL,
                  *, workers: int | None = None) -> list[ProjectionResult]:
    """Projections for each query row, in order; failures name the index."""
    Q = np.asarray(queries, dtype=float)
    if Q.size == 0:
        return []
    if Q.ndim != 2:
        raise ProjectionError("queries must be a 2-d array")
    wk = resolve_workers(workers)

    def one(i):
        try:
            return project(body, Q[i], tol)
        except Exception as e:
            raise ProjectionError(f"projection failed for query {i}: {e}") from e

    return thread_map(one, range(len(Q)), wk)
