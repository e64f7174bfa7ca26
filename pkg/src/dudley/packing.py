"""Separated point sets on spheres with certified covering radius.

A packing here is a set of points on the sphere of a given radius whose
pairwise distances are at least ``delta`` and which leaves no sphere point
farther than ``delta`` from the set.  Separation is exact by construction.
Coverage relies on a classical fact: the convex hull of points on a sphere
is their spherical Delaunay complex, and each hull facet's circumscribed cap
is empty of other points, so the covering radius is just the largest facet
circumradius and every residual gap is exposed at a facet circumcenter.  For
d in {3, 4} those circumcenters (themselves legal members) are inserted
until none exceeds delta, making coverage exact, and a sampling round then
confirms; for d >= 5 coverage falls back to sampling rounds alone, ending
after ten consecutive clean rounds.

Dimensions 1 and 2 are handled by closed-form constructions; higher
dimensions use greedy rejection sampling that stops after a configurable
number of consecutive rejections.  Admission tests run on a uniform grid
with cell edge ``delta``: any point within ``delta`` of a query lands within
one cell of it per axis, so a 3^d-cell ring lookup is exact at that
threshold.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree
from scipy.spatial.distance import cdist

from .errors import GeometryError, PackingError
from .geometry import as_vector
from .utils import resolve_workers, subseed

DEFAULT_REJECTION_STOP = 10_000
DEFAULT_COVERAGE_SAMPLES = 100_000
SEPARATION_SLACK = 1e-9  # verification bar: min separation >= delta * (1 - slack)

_TAG_GREEDY = 1
_TAG_COVERAGE = 2
_TAG_VERIFY = 3

_MAX_BATCH = 32768
_CLEAN_ROUNDS = 10  # consecutive clean sampling rounds required without repair
_MAX_CELLS = 8 * 10**7  # grid memory guard


@dataclass(frozen=True)
class SpherePacking:
    points: np.ndarray  # (n, d), in acceptance order
    center: np.ndarray
    radius: float
    delta: float
    seed: int

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise GeometryError("packing needs at least one point")
        c = as_vector(self.center, pts.shape[1])
        pts.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class PackingReport:
    max_gap: float
    min_separation: float
    passed: bool


def packing_cardinality_bound(d: int, R: float, delta: float) -> float:
    """Conservative size envelope ``(4R/delta)^(d-1)`` for reporting."""
    if d < 1 or R <= 0 or delta <= 0:
        raise GeometryError("need d >= 1, R > 0, delta > 0")
    return float((4.0 * R / delta) ** (d - 1))


def _sphere_samples(rng, n: int, dim: int, center, radius: float) -> np.ndarray:
    """Uniform samples on the sphere (isotropic Gaussian, normalized)."""
    g = rng.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1)
    while True:
        bad = np.flatnonzero(norms < 1e-12)
        if bad.size == 0:
            break
        g[bad] = rng.standard_normal((bad.size, dim))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
    return center + radius * (g / norms[:, None])


def _expand_ranges(starts, widths):
    # Concatenated [s, s+w) ranges as one flat index array.
    total = int(widths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    rep = np.repeat(starts, widths)
    base = np.repeat(np.cumsum(widths) - widths, widths)
    return rep + (np.arange(total, dtype=np.int64) - base)


class _GridIndex:
    """Uniform-grid neighbor index over a growing point set.

    The bulk of the set lives in an array sorted by cell key with dense
    bucket offsets; fresh points accumulate in a small sorted tail whose
    touched cells are flagged in a byte mask, and are merged into the bulk
    once the tail passes a size threshold.  All distance tests at threshold
    <= cell edge are exact via the 3^d ring.
    """

    _TAIL_LIMIT = 32768

    def __init__(self, dim: int, center, radius: float, cell: float):
        self.dim = dim
        self.cell = float(cell)
        self.lo = np.asarray(center, dtype=float) - radius - 2.0 * cell
        side = int(math.ceil(2.0 * radius / cell)) + 6
        ncells = side ** dim
        if ncells > _MAX_CELLS:
            raise PackingError("delta is too small for this sphere")
        self.side = side
        self.ncells = ncells
        self._strides = np.array([side ** (dim - 1 - j) for j in range(dim)],
                                 dtype=np.int64)
        self._ring = (np.array(list(itertools.product((-1, 0, 1), repeat=dim)),
                               dtype=np.int64) @ self._strides)
        self._main = np.empty((0, dim))
        self._starts = np.zeros(ncells + 1, dtype=np.int32)
        self._tail = np.empty((0, dim))
        self._tail_keys = np.empty(0, dtype=np.int64)
        self._tail_occ = np.zeros(ncells, dtype=np.uint8)
        self._chunks: list[np.ndarray] = []
        self.n = 0

    def _keys(self, X: np.ndarray) -> np.ndarray:
        idx = np.floor((X - self.lo) / self.cell).astype(np.int64)
        np.clip(idx, 1, self.side - 2, out=idx)
        return idx @ self._strides

    def add(self, pts: np.ndarray) -> None:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        self._chunks.append(pts.copy())
        self.n += len(pts)
        keys = self._keys(pts)
        tk = np.concatenate([self._tail_keys, keys])
        tp = np.concatenate([self._tail, pts])
        order = np.argsort(tk, kind="stable")
        self._tail_keys = tk[order]
        self._tail = tp[order]
        self._tail_occ[keys] = 1
        if len(self._tail) >= self._TAIL_LIMIT:
            self._rebuild()

    def _rebuild(self) -> None:
        allpts = np.concatenate([self._main, self._tail])
        keys = self._keys(allpts)
        order = np.argsort(keys, kind="stable")
        self._main = allpts[order]
        counts = np.bincount(keys, minlength=self.ncells)
        starts = np.empty(self.ncells + 1, dtype=np.int64)
        starts[0] = 0
        np.cumsum(counts, out=starts[1:])
        self._starts = starts.astype(np.int32)
        self._tail = np.empty((0, self.dim))
        self._tail_keys = np.empty(0, dtype=np.int64)
        self._tail_occ[:] = 0

    def _ring_candidates(self, X: np.ndarray):
        """Flat (owner, candidate-point) pairs for all ring-bucket members."""
        nb = (self._keys(X)[:, None] + self._ring[None, :]).ravel()
        owners_nb = np.repeat(np.arange(len(X)), len(self._ring))

        s = self._starts[nb].astype(np.int64)
        w = (self._starts[nb + 1] - self._starts[nb]).astype(np.int64)
        flat = _expand_ranges(s, w)
        owner = np.repeat(owners_nb, w)
        cand = self._main[flat]

        if len(self._tail):
            occ = np.flatnonzero(self._tail_occ[nb])
            if occ.size:
                lo_t = np.searchsorted(self._tail_keys, nb[occ], side="left")
                hi_t = np.searchsorted(self._tail_keys, nb[occ], side="right")
                w2 = (hi_t - lo_t).astype(np.int64)
                flat2 = _expand_ranges(lo_t.astype(np.int64), w2)
                owner = np.concatenate([owner, np.repeat(owners_nb[occ], w2)])
                cand = np.concatenate([cand, self._tail[flat2]])
        return owner, cand

    def has_within(self, X: np.ndarray, thresh: float) -> np.ndarray:
        """Per-row: does any stored point lie strictly within ``thresh``?

        Exact only for thresh <= the grid cell edge.
        """
        out = np.zeros(len(X), dtype=bool)
        if self.n == 0 or len(X) == 0:
            return out
        owner, cand = self._ring_candidates(X)
        if owner.size:
            diff = cand - X[owner]
            d2 = np.einsum("ij,ij->i", diff, diff)
            out[owner[d2 < thresh * thresh]] = True
        return out

    def points(self) -> np.ndarray:
        if not self._chunks:
            return np.empty((0, self.dim))
        return np.vstack(self._chunks)


def _admit_sequential(X: np.ndarray, candidates: np.ndarray, delta: float,
                      new_buf: np.ndarray):
    """Greedy pass over candidate rows of X, honoring in-batch conflicts.

    Returns (accepted positions, accepted count); accepted points are staged
    in new_buf but not yet indexed.
    """
    m = 0
    positions = []
    for i in candidates:
        x = X[i]
        if m:
            d2 = np.min(np.sum((new_buf[:m] - x) ** 2, axis=1))
            if d2 < delta * delta:
                continue
        new_buf[m] = x
        m += 1
        positions.append(int(i))
    return positions, m


def _admit_batch(store: _GridIndex, X: np.ndarray, delta: float) -> int:
    """Insert every row of X that keeps pairwise separation >= delta.

    Same decisions as admitting row by row — row i survives iff nothing
    stored and no surviving earlier row lies strictly within delta — but
    the in-batch conflict scan runs over kd-tree pairs instead of the
    quadratic loop, which matters when a repair pass proposes 10^5 points.
    """
    if len(X) == 0:
        return 0
    ok = np.flatnonzero(~store.has_within(X, delta))
    if ok.size == 0:
        return 0
    if ok.size <= 64:
        buf = np.empty((ok.size, X.shape[1]))
        _, m = _admit_sequential(X, ok, delta, buf)
        if m:
            store.add(buf[:m])
        return m
    C = np.ascontiguousarray(X[ok])
    # The slack absorbs kd-tree rounding at the threshold; the strict-<
    # recheck below is the deciding test and matches the sequential path.
    pairs = cKDTree(C).query_pairs(delta * (1.0 + 1e-12), output_type="ndarray")
    if len(pairs):
        d2 = np.sum((C[pairs[:, 0]] - C[pairs[:, 1]]) ** 2, axis=1)
        pairs = pairs[d2 < delta * delta]
    admitted = np.ones(len(C), dtype=bool)
    if len(pairs):
        order = np.argsort(pairs[:, 1], kind="stable")
        lo = pairs[order, 0].tolist()
        hi = pairs[order, 1].tolist()
        k, n_edges = 0, len(lo)
        while k < n_edges:
            j = hi[k]
            blocked = False
            while k < n_edges and hi[k] == j:
                if admitted[lo[k]]:
                    blocked = True
                k += 1
            if blocked:
                admitted[j] = False
    kept = C[admitted]
    store.add(kept)
    return len(kept)


def _greedy_sphere_packing(dim, center, radius, delta, seed, rejection_stop):
    rng = np.random.default_rng(subseed(seed, _TAG_GREEDY))
    store = _GridIndex(dim, center, radius, delta)
    new_buf = np.empty((_MAX_BATCH, dim))
    run = 0  # consecutive rejections, carried across batches
    batch = 512
    while True:
        X = _sphere_samples(rng, batch, dim, center, radius)
        rejected = store.has_within(X, delta)
        candidates = np.flatnonzero(~rejected)
        positions, m = _admit_sequential(X, candidates, delta, new_buf)

        # Replay the rejection counter in sample order; acceptances after the
        # stop point never happened.
        keep = 0
        stopped = False
        prev = -1
        for k, p in enumerate(positions):
            if run + (p - prev - 1) >= rejection_stop:
                stopped = True
                break
            run = 0
            prev = p
            keep = k + 1
        if not stopped:
            run += batch - prev - 1
            stopped = run >= rejection_stop
        if keep:
            store.add(new_buf[:keep])
        if stopped:
            return store
        if m * 8 < batch:
            batch = min(batch * 2, _MAX_BATCH)


def _det3(M: np.ndarray) -> np.ndarray:
    # Explicit cofactor form: LAPACK-per-matrix is far too slow at the
    # millions of 3x3 systems a 4-d hull produces.
    a, b, c = M[:, 0, 0], M[:, 0, 1], M[:, 0, 2]
    d, e, f = M[:, 1, 0], M[:, 1, 1], M[:, 1, 2]
    g, h, i = M[:, 2, 0], M[:, 2, 1], M[:, 2, 2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _facet_normals(S: np.ndarray, dim: int) -> np.ndarray:
    """Unnormalized normals of simplices S (F, dim, dim) of unit vectors."""
    E = S[:, 1:, :] - S[:, :1, :]
    if dim == 3:
        return np.cross(E[:, 0], E[:, 1])
    # dim == 4: vector orthogonal to the three edge rows, via the usual
    # alternating-minor expansion.
    n = np.empty((len(S), 4))
    cols = np.arange(4)
    for j in range(4):
        n[:, j] = (-1.0) ** j * _det3(E[:, :, cols != j])
    return n


def _delaunay_repair(store: _GridIndex, dim, center, radius, delta,
                     max_passes=60) -> bool:
    """Insert facet circumcenters until the covering radius is <= delta.

    On a sphere the convex hull is the spherical Delaunay complex and each
    facet's circumcap contains no other member, so the deepest gaps sit
    exactly at facet circumcenters.  Any circumcenter whose cap chord
    exceeds delta is both a coverage violation and a legal insertion.
    Returns False when qhull cannot triangulate (caller falls back to
    sampling alone).
    """
    for _ in range(max_passes):
        U = (store.points() - center) / radius
        try:
            hull = ConvexHull(U, qhull_options="Qt")
        except QhullError:
            return False
        # Facets are processed in slabs: materializing all simplices of a
        # million-point 4-d hull at once costs several GB.
        parts = []
        for lo in range(0, len(hull.simplices), 500_000):
            S = U[hull.simplices[lo:lo + 500_000]]
            n = _facet_normals(S, dim)
            norm = np.linalg.norm(n, axis=1)
            ok = norm > 1e-13  # sliver facets carry no usable circumcenter
            n = n[ok] / norm[ok, None]
            apex = S[ok, 0, :]
            sign = np.sign(np.einsum("ij,ij->i", n, apex))
            sign[sign == 0] = 1.0
            n *= sign[:, None]
            # Chord from circumcenter to a facet vertex = cap covering radius.
            chord = radius * np.linalg.norm(n - apex, axis=1)
            parts.append(n[chord > delta * (1.0 + 1e-12)])
        cand = np.concatenate(parts) if parts else np.empty((0, dim))
        del hull
        if not len(cand):
            return True
        admitted = _admit_batch(store, center + radius * cand, delta)
        if admitted == 0:
            # Every remaining candidate was a hair inside delta of a member
            # once recomputed exactly on the grid; nothing left to fix.
            return True
    raise PackingError("coverage repair did not converge")


def _patch_coverage(store: _GridIndex, dim, center, radius, delta, seed,
                    coverage_samples, max_rounds=5000):
    """Close residual coverage gaps left by the greedy phase.

    For d <= 4 the gaps are found exactly at Delaunay circumcenters and a
    single clean sampling round then confirms; otherwise sampling rounds
    insert whatever they find until _CLEAN_ROUNDS in a row find nothing.
    """
    exact = False
    if dim in (3, 4) and store.n >= 2 * (dim + 1):
        exact = _delaunay_repair(store, dim, center, radius, delta)
    clean_target = 1 if exact else _CLEAN_ROUNDS
    clean = 0
    for rnd in range(max_rounds):
        rng = np.random.default_rng(subseed(seed, _TAG_COVERAGE, rnd))
        S = _sphere_samples(rng, coverage_samples, dim, center, radius)
        far = np.flatnonzero(~store.has_within(S, delta))
        admitted = _admit_batch(store, S[far], delta) if far.size else 0
        if admitted and exact:
            _delaunay_repair(store, dim, center, radius, delta)
        clean = clean + 1 if admitted == 0 else 0
        if clean >= clean_target:
            return
    raise PackingError("coverage certification did not converge")


def build_packing(d: int, center, radius: float, delta: float, seed: int, *,
                  rejection_stop: int = DEFAULT_REJECTION_STOP,
                  coverage_samples: int = DEFAULT_COVERAGE_SAMPLES,
                  workers: int | None = None) -> SpherePacking:
    """Build a delta-separated, delta-covering point set on a sphere.

    Separation >= delta holds exactly for every pair.  Coverage is exact for
    d <= 2 and certified by sampling for d >= 3 (construction ends only after
    ten clean rounds of ``coverage_samples`` each find no insertable point).
    Identical arguments produce identical packings.
    """
    if d < 1:
        raise GeometryError("dimension must be at least 1")
    c = as_vector(center, d)
    radius = float(radius)
    delta = float(delta)
    if not (radius > 0.0) or not math.isfinite(radius):
        raise GeometryError("sphere radius must be positive and finite")
    if not (delta > 0.0) or not math.isfinite(delta):
        raise GeometryError("delta must be positive and finite")
    if rejection_stop < 1:
        raise GeometryError("rejection_stop must be at least 1")
    if coverage_samples < 1:
        raise GeometryError("coverage_samples must be at least 1")
    resolve_workers(workers)  # validates the environment variable

    if delta > 2.0 * radius:
        # No two sphere points are delta apart; a single point covers the
        # whole sphere (its diameter is below delta).
        pts = c[None, :].copy()
        pts[0, 0] += radius
        return SpherePacking(pts, c, radius, delta, seed)

    if d == 1:
        pts = np.array([c - radius, c + radius])
        return SpherePacking(pts, c, radius, delta, seed)

    if d == 2:
        # Largest equally spaced count whose step chord is still >= delta;
        # the half-step chord (covering radius) is then <= delta.
        alpha = 2.0 * math.asin(min(1.0, delta / (2.0 * radius)))
        if 2.0 * math.pi / alpha > 1e8:
            raise PackingError("delta is too small for this sphere")
        # The 1e-9 nudge keeps exact-ratio cases (e.g. the hexagon) from
        # flooring one short; the separation shortfall it can introduce is
        # orders below the 1e-9 relative tolerance.
        n = max(2, int(math.floor(2.0 * math.pi / alpha + 1e-9)))
        theta = 2.0 * math.pi * np.arange(n) / n
        pts = c + radius * np.column_stack([np.cos(theta), np.sin(theta)])
        return SpherePacking(pts, c, radius, delta, seed)

    if packing_cardinality_bound(d, radius, delta) > 1e8:
        raise PackingError("delta is too small for this sphere")
    store = _greedy_sphere_packing(d, c, radius, delta, seed, rejection_stop)
    _patch_coverage(store, d, c, radius, delta, seed, coverage_samples)
    return SpherePacking(store.points(), c, radius, delta, seed)


def verify_packing(packing: SpherePacking, n_samples: int, seed: int,
                   *, workers: int | None = None) -> PackingReport:
    """Exact pairwise separation plus sampled covering radius.

    Runs on kd-trees, deliberately sharing no code with the grid used during
    construction.
    """
    if n_samples < 1:
        raise GeometryError("n_samples must be at least 1")
    wk = resolve_workers(workers)
    pts = packing.points
    n = len(pts)
    if n == 1:
        min_sep = math.inf
    elif n <= 2048:
        D = cdist(pts, pts)
        np.fill_diagonal(D, np.inf)
        min_sep = float(D.min())
    else:
        dd, _ = cKDTree(pts).query(pts, k=2, workers=wk)
        min_sep = float(dd[:, 1].min())

    rng = np.random.default_rng(subseed(seed, _TAG_VERIFY))
    S = _sphere_samples(rng, n_samples, packing.dim, packing.center, packing.radius)
    tree = cKDTree(pts)
    gaps, _ = tree.query(S, k=1, workers=wk)
    max_gap = float(gaps.max())

    passed = (min_sep >= packing.delta * (1.0 - SEPARATION_SLACK)
              and max_gap <= packing.delta)
    return PackingReport(max_gap=max_gap, min_separation=min_sep, passed=passed)
