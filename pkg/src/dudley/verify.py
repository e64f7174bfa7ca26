"""Checks on an approximation: containment, Hausdorff gap, 2-d exact gap.

Containment of a vertex body in an H-polytope is a full exact check (every
vertex against every halfspace).  The Hausdorff gap between nested convex
bodies equals the sup over unit directions of the support difference; it is
estimated by sampling directions, which always underestimates, and in 2-d can
be computed exactly by enumerating the polytope's vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scipy.spatial import HalfspaceIntersection, QhullError

from .errors import DimensionMismatchError, GeometryError, LPError
from .geometry import Ball, HPolytope, VPolytope, support_batch
from .linprog import FEAS_TOL, OPT_TOL, SupportSweep, _check_bounded, chebyshev_center
from .projection import project
from .utils import resolve_workers, subseed

PRUNE_TOL = 1e-9  # feasibility slack when keeping candidate vertices

_TAG_DIRECTIONS = 11


@dataclass(frozen=True)
class ContainmentReport:
    ok: bool
    worst_violation: float


@dataclass(frozen=True)
class HausdorffReport:
    estimate: float
    worst_direction: np.ndarray
    n_directions: int
    certified: bool = False


def check_containment(C, D: HPolytope, tol: float = 1e-8) -> ContainmentReport:
    """Is C a subset of D, up to tol of signed-distance slack?"""
    if C.dim != D.dim:
        raise DimensionMismatchError("bodies live in different dimensions")
    if isinstance(C, VPolytope):
        worst = float(np.max(D.A @ C.vertices.T - D.b[:, None]))
    elif isinstance(C, Ball):
        worst = float(np.max(D.A @ C.center - D.b + C.radius))
    else:
        raise GeometryError(f"cannot check containment of {type(C).__name__}")
    return ContainmentReport(ok=worst <= tol, worst_violation=worst)


class _VertexSupport:
    """Support values via an explicit vertex set.

    For polytopes with thousands of halfspaces the basis cache stops paying
    off (every direction lands in a different cone), so enumerate the
    vertices once and take a max of dot products per direction — the same
    optimum the LP reports, without per-direction solves.
    """

    _VBLOCK = 8192

    def __init__(self, D: HPolytope):
        center, radius = chebyshev_center(D)
        if radius <= 1e-10:
            raise GeometryError("polytope has (nearly) empty interior")
        hull = HalfspaceIntersection(np.hstack([D.A, -D.b[:, None]]), center)
        self.vertices = np.asarray(hull.intersections)

    def values(self, U: np.ndarray, chunk: int = 2048) -> np.ndarray:
        V = self.vertices
        out = np.empty(len(U))
        for lo in range(0, len(U), chunk):
            block = U[lo:lo + chunk]
            best = np.full(len(block), -np.inf)
            for vb in range(0, len(V), self._VBLOCK):
                np.maximum(best, (block @ V[vb:vb + self._VBLOCK].T).max(axis=1),
                           out=best)
            out[lo:lo + chunk] = best
        return out


def hausdorff_gap(C, D: HPolytope, n_directions: int, seed: int,
                  *, workers: int | None = None,
                  chunk: int = 8192) -> HausdorffReport:
    """Sampled lower estimate of the Hausdorff distance between C and D.

    Assumes C is contained in D, so the gap is the largest support
    difference.  The estimate never exceeds the true gap.  D must be bounded.
    """
    if C.dim != D.dim:
        raise DimensionMismatchError("bodies live in different dimensions")
    if n_directions < 1:
        raise GeometryError("n_directions must be at least 1")
    _check_bounded(D, FEAS_TOL, OPT_TOL)
    resolve_workers(workers)  # validates the environment variable

    evaluator = None
    if C.dim >= 2 and len(D) >= 600 and n_directions >= 2000:
        try:
            evaluator = _VertexSupport(D)
        except (QhullError, GeometryError, LPError):
            evaluator = None  # fall back to the exact-but-slower sweep
    if evaluator is None:
        evaluator = SupportSweep(D)

    rng = np.random.default_rng(subseed(seed, _TAG_DIRECTIONS))
    best = -np.inf
    best_dir = None
    remaining = n_directions
    while remaining > 0:
        k = min(chunk, remaining)
        remaining -= k
        U = rng.standard_normal((k, C.dim))
        norms = np.linalg.norm(U, axis=1)
        small = norms < 1e-12
        norms[small] = 1.0
        U[small] = 0.0
        U[small, 0] = 1.0
        U /= norms[:, None]
        hD = evaluator.values(U)
        hC, _ = support_batch(C, U)
        diff = hD - hC
        i = int(np.argmax(diff))
        if diff[i] > best:
            best = float(diff[i])
            best_dir = U[i].copy()
    return HausdorffReport(estimate=max(best, 0.0), worst_direction=best_dir,
                           n_directions=n_directions)


def _line_corner(i: int, j: int, A, b):
    det = A[i, 0] * A[j, 1] - A[i, 1] * A[j, 0]
    if abs(det) < 1e-14:
        return None
    return np.array([
        (b[i] * A[j, 1] - b[j] * A[i, 1]) / det,
        (A[i, 0] * b[j] - A[j, 0] * b[i]) / det,
    ])


def enumerate_vertices_2d(D: HPolytope) -> np.ndarray:
    """Vertices of a bounded 2-d H-polytope.

    Halfspace boundaries sorted by normal angle are intersected pairwise in
    cyclic order.  Redundant constraints must go first, or they break the
    adjacency the pairing relies on: a constraint whose two cyclic neighbors
    meet strictly inside it contributes no edge (its normal lies in the
    neighbors' cone, so the whole neighbor wedge is on its feasible side)
    and is dropped, repeating until stable.  Duplicate normals keep only the
    tightest offset; surviving adjacent intersections are pruned at
    PRUNE_TOL for safety.
    """
    if D.dim != 2:
        raise GeometryError("vertex enumeration is 2-d only")
    _check_bounded(D, FEAS_TOL, OPT_TOL)
    A, b = D.A, D.b
    angles = np.arctan2(A[:, 1], A[:, 0])
    order = np.argsort(angles, kind="stable")

    keep: list[int] = []
    for idx in order:
        i = int(idx)
        if keep and angles[i] - angles[keep[-1]] < 1e-12:
            if b[i] < b[keep[-1]]:
                keep[-1] = i
        else:
            keep.append(i)
    if len(keep) > 1 and (angles[keep[0]] + 2.0 * np.pi) - angles[keep[-1]] < 1e-12:
        if b[keep[0]] > b[keep[-1]]:
            keep[0] = keep[-1]
        keep.pop()

    while len(keep) >= 3:
        m = len(keep)
        drop = np.zeros(m, dtype=bool)
        for k in range(m):
            ip, cur,in_ = keep[k - 1], keep[k], keep[(k + 1) % m]
            span = angles[in_] - angles[ip]
            if span <= 0:
                span += 2.0 * np.pi
            if span >= np.pi - 1e-12:
                continue  # neighbor cone too wide; elimination test invalid
            p = _line_corner(ip, in_, A, b)
            if p is not None and float(A[cur] @ p) <= b[cur] - 1e-12:
                drop[k] = True
        if not drop.any():
            break
        keep = [keep[k] for k in range(m) if not drop[k]]

    m = len(keep)
    if m < 3:
        raise GeometryError("fewer than three independent halfspaces")
    verts = []
    for k in range(m):
        v = _line_corner(keep[k], keep[(k + 1) % m], A, b)
        if v is not None and float(np.max(A @ v - b)) <= PRUNE_TOL:
            verts.append(v)
    if not verts:
        raise GeometryError("vertex enumeration found no feasible vertex")
    return np.array(verts)


def exact_gap_2d(C, D: HPolytope) -> float:
    """Exact Hausdorff gap in 2-d: the farthest vertex of D from C."""
    verts = enumerate_vertices_2d(D)
    worst = 0.0
    for v in verts:
        worst = max(worst, project(C, v).distance)
    return worst
