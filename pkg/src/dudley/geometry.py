"""Convex body primitives and the elementary operations on them.

Two body representations are used throughout: ``VPolytope`` (convex hull of a
finite vertex list) and ``Ball``.  Halfspaces are stored in the form
``<normal, x> <= offset`` with a unit normal; intersections of halfspaces are
``HPolytope``.  All coordinates are numpy float64 arrays, frozen after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, GeometryError

# Normals are renormalized at construction when they deviate from unit length
# by more than this.
UNIT_NORMAL_TOL = 1e-12


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-d float array, optionally checking its length."""
    v = np.array(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise GeometryError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise GeometryError("vector has non-finite entries")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Halfspace:
    """The set ``{x : <normal, x> <= offset}`` with ``normal`` of unit length.

    A non-unit input normal is rescaled together with the offset, which leaves
    the point set unchanged.  Zero normals are rejected.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal)
        length = float(np.linalg.norm(n))
        if length == 0.0:
            raise GeometryError("halfspace normal must be nonzero")
        off = float(self.offset)
        if abs(length - 1.0) > UNIT_NORMAL_TOL:
            n = n / length
            off = off / length
        object.__setattr__(self, "normal", _freeze(n))
        object.__setattr__(self, "offset", off)

    @property
    def dim(self) -> int:
        return self.normal.size

    def contains(self, point, tol: float = 0.0) -> bool:
        return signed_distance(self, point) <= tol


@dataclass(frozen=True)
class HPolytope:
    """Intersection of finitely many halfspaces (at least one)."""

    halfspaces: tuple[Halfspace, ...]
    # Stacked constraint data, A @ x <= b with unit rows of A.
    A: np.ndarray = field(init=False, repr=False, compare=False)
    b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise GeometryError("HPolytope needs at least one halfspace")
        dim = hs[0].dim
        for h in hs:
            if h.dim != dim:
                raise DimensionMismatchError("halfspaces have mixed dimensions")
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "A", _freeze(np.array([h.normal for h in hs])))
        object.__setattr__(self, "b", _freeze(np.array([h.offset for h in hs])))

    @property
    def dim(self) -> int:
        return self.halfspaces[0].dim

    def __len__(self) -> int:
        return len(self.halfspaces)


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a finite vertex list (kept as given, no dedup)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise GeometryError(f"bad vertex array shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise GeometryError("vertices have non-finite entries")
        object.__setattr__(self, "vertices", _freeze(v))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def support(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        scores = self.vertices @ u
        i = int(np.argmax(scores))
        return float(scores[i]), self.vertices[i].copy()

    def support_batch(self, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        scores = U @ self.vertices.T
        idx = np.argmax(scores, axis=1)
        return scores[np.arange(len(U)), idx], self.vertices[idx]


@dataclass(frozen=True)
class Ball:
    """Euclidean ball with strictly positive radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_vector(self.center)
        r = float(self.radius)
        if not (r > 0.0):
            raise GeometryError("ball radius must be positive")
        object.__setattr__(self, "center", _freeze(c))
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size

    def support(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        nu = float(np.linalg.norm(u))
        witness = self.center + self.radius * (u / nu)
        return float(self.center @ u) + self.radius * nu, witness

    def support_batch(self, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        norms = np.linalg.norm(U, axis=1)
        values = U @ self.center + self.radius * norms
        witnesses = self.center + self.radius * U / norms[:, None]
        return values, witnesses

    def to_vpolytope(self, n: int) -> VPolytope:
        """Inscribed regular n-gon, dimension 2 only."""
        if self.dim != 2:
            raise GeometryError("polygonalization is 2-d only")
        if n < 3:
            raise GeometryError("need at least 3 vertices")
        theta = 2.0 * np.pi * np.arange(n) / n
        pts = self.center + self.radius * np.column_stack([np.cos(theta), np.sin(theta)])
        return VPolytope(pts)


class ExpandedBody:
    """Minkowski sum of a body with a closed ball of radius eps.

    Supports the same support-function queries as the underlying body; the
    support value in direction u grows by exactly ``eps * |u|``.
    """

    def __init__(self, base, eps: float):
        if eps < 0:
            raise GeometryError("expansion radius must be nonnegative")
        self.base = base
        self.eps = float(eps)

    @property
    def dim(self) -> int:
        return self.base.dim

    def support(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        value, witness = self.base.support(u)
        nu = float(np.linalg.norm(u))
        return value + self.eps * nu, witness + self.eps * (u / nu)

    def support_batch(self, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        values, witnesses = self.base.support_batch(U)
        norms = np.linalg.norm(U, axis=1)
        return values + self.eps * norms, witnesses + self.eps * U / norms[:, None]


def support(body, u) -> tuple[float, np.ndarray]:
    """Support value ``max_{x in body} <u, x>`` and a witness point.

    The direction need not be unit but must be nonzero.
    """
    u = as_vector(u, getattr(body, "dim", None))
    if float(np.linalg.norm(u)) == 0.0:
        raise GeometryError("support direction must be nonzero")
    return body.support(u)


def support_batch(body, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[1] != body.dim:
        raise DimensionMismatchError("direction batch has wrong shape")
    return body.support_batch(U)


def signed_distance(halfspace: Halfspace, point) -> float:
    """Negative inside, zero on the boundary, positive outside."""
    p = as_vector(point, halfspace.dim)
    return float(halfspace.normal @ p - halfspace.offset)


def halfspace_through(point, outward) -> Halfspace:
    """Halfspace whose boundary passes through ``point`` with the given
    outward direction (not necessarily unit)."""
    p = as_vector(point)
    u = as_vector(outward, p.size)
    length = float(np.linalg.norm(u))
    if length == 0.0:
        raise GeometryError("outward direction must be nonzero")
    n = u / length
    return Halfspace(n, float(n @ p))


def expand_body(body, eps: float) -> ExpandedBody:
    """The eps-neighborhood of a convex body (Minkowski sum with a ball)."""
    return ExpandedBody(body, eps)
