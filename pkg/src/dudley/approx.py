"""Outer approximation of a convex body by supporting halfspaces.

The construction: put a sphere around the body, spread a delta-separated,
delta-covering point set on it, project every point onto the body, and take
the supporting halfspace at each projection (normal pointing back at the
sphere point).  The intersection of these halfspaces contains the body and
hugs it to within the target epsilon; the number of halfspaces scales like
``eps^-(d-1)/2``.

Two regimes are provided.  ``paper_exact`` requires the body to contain the
unit ball and fit in the ball of radius d about the origin, uses the sphere
of radius 2d and ``delta = sqrt(d * eps / 8)``, and guarantees a one-sided
gap of eps/2.  ``generalized`` drops the normalization: it centers the sphere
at the vertex centroid, uses radius twice the circumradius R and
``delta = sqrt(R * eps / 12)``, with the same eps/2 one-sided gap.

``audit_proof`` replays the error analysis pointwise on sampled boundary
points and reports every quantity the halfspace-count argument relies on.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .errors import GeometryError, SandwichError, UnboundedError
from .geometry import (
    Ball,
    HPolytope,
    VPolytope,
    halfspace_through,
    support_batch,
)
from .linprog import SupportSweep  # noqa: F401  (re-exported for callers)
from .packing import (
    DEFAULT_COVERAGE_SAMPLES,
    DEFAULT_REJECTION_STOP,
    SpherePacking,
    build_packing,
    packing_cardinality_bound,
)
from .projection import project_batch
from .utils import resolve_workers, subseed
from .verify import check_containment, hausdorff_gap

MODE_EXACT = "paper_exact"
MODE_GENERAL = "generalized"
MODES = (MODE_EXACT, MODE_GENERAL)

AUDIT_TOL = 1e-7

_TAG_AUDIT = 21
_TAG_REPORT = 22


@dataclass(frozen=True)
class SandwichReport:
    inradius: float
    circumradius: float
    ok: bool


@dataclass(frozen=True)
class DudleyConfig:
    epsilon: float
    mode: str = MODE_EXACT
    seed: int = 0
    projection_tol: float = 1e-9
    rejection_stop: int = DEFAULT_REJECTION_STOP
    coverage_samples: int = DEFAULT_COVERAGE_SAMPLES
    report_directions: int = 100_000

    def __post_init__(self):
        if not (self.epsilon > 0.0) or not math.isfinite(self.epsilon):
            raise GeometryError("epsilon must be positive and finite")
        if self.mode not in MODES:
            raise GeometryError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.seed < 0:
            raise GeometryError("seed must be nonnegative")
        if not (self.projection_tol > 0.0):
            raise GeometryError("projection_tol must be positive")


@dataclass(frozen=True)
class Construction:
    body: VPolytope | Ball
    packing: SpherePacking
    nqs: np.ndarray  # row i is the body contact for packing point i
    result: HPolytope
    delta: float
    sphere_radius: float
    sphere_center: np.ndarray
    epsilon: float
    mode: str
    seed: int
    projection_tol: float

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def contacts(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [(q, nq) for q, nq in zip(self.packing.points, self.nqs)]


@dataclass(frozen=True)
class ApproximationReport:
    halfspace_count: int
    delta: float
    epsilon: float
    dim: int
    theoretical_envelope: float
    containment_ok: bool
    hausdorff_estimate: float
    runtime_ms: float


@dataclass(frozen=True)
class ProofAudit:
    """Per-sample replay of the gap analysis.

    Arrays are aligned: row i holds the boundary point p, its outward
    direction v, the sphere hit p', the nearest packing point q with its body
    contact nq, and the derived quantities.  ``violations`` lists rows where
    any check fails beyond AUDIT_TOL; ``check_violations`` splits them by
    check name ('coverage', 'contraction', 'chord', 'angle', 'halfspace').
    """

    p: np.ndarray
    v: np.ndarray
    p_prime: np.ndarray
    q: np.ndarray
    nq: np.ndarray
    gap_pprime_q: np.ndarray
    gap_p_nq: np.ndarray
    ell: np.ndarray
    sin_gamma: np.ndarray
    dist_p_boundary: np.ndarray
    violations: tuple[int, ...]
    check_violations: dict = field(compare=False)
    thresholds: dict = field(compare=False)

    @property
    def n_samples(self) -> int:
        return len(self.p)


def _inradius_about_origin(body) -> float:
    if isinstance(body, Ball):
        return body.radius - float(np.linalg.norm(body.center))
    v = body.vertices
    if body.dim == 1:
        return float(min(v[:, 0].max(), -v[:, 0].min()))
    try:
        hull = ConvexHull(v)
    except QhullError:
        return 0.0  # flat body, empty interior
    return float(-hull.equations[:, -1].max())


def validate_sandwich(body, d: int) -> SandwichReport:
    """Check the exact-mode hypothesis: unit ball inside, radius-d ball outside.

    The inradius is taken about the origin (negative when the origin lies
    outside the body).
    """
    if body.dim != d:
        raise GeometryError(f"body dimension {body.dim} does not match d={d}")
    if isinstance(body, Ball):
        circum = float(np.linalg.norm(body.center)) + body.radius
    else:
        circum = float(np.linalg.norm(body.vertices, axis=1).max())
    inr = _inradius_about_origin(body)
    ok = inr >= 1.0 - 1e-12 and circum <= float(d) + 1e-12
    return SandwichReport(inradius=inr, circumradius=circum, ok=ok)


def _centroid_and_circumradius(body) -> tuple[np.ndarray, float]:
    if isinstance(body, Ball):
        return body.center.copy(), body.radius
    c = body.vertices.mean(axis=0)
    R = float(np.linalg.norm(body.vertices - c, axis=1).max())
    return c, R


def assemble_construction(body, packing: SpherePacking,
                          config: DudleyConfig) -> Construction:
    """Supporting halfspaces for an already-built sphere point set.

    Each packing point is projected onto the body; the halfspace through the
    projection, with outward normal toward the packing point, supports the
    body.  Exposed separately so callers can audit hand-made (for example,
    corrupted) packings.
    """
    if packing.dim != body.dim:
        raise GeometryError("packing and body dimensions differ")
    results = project_batch(body, packing.points, config.projection_tol)
    nqs = np.array([r.point for r in results])
    halfspaces = []
    for q, r in zip(packing.points, results):
        outward = q - r.point
        if float(np.linalg.norm(outward)) <= 1e-12:
            raise GeometryError("packing point lies in the body; sphere too small")
        halfspaces.append(halfspace_through(r.point, outward))
    D = HPolytope(tuple(halfspaces))
    return Construction(
        body=body, packing=packing, nqs=nqs, result=D,
        delta=packing.delta, sphere_radius=packing.radius,
        sphere_center=packing.center.copy(), epsilon=config.epsilon,
        mode=config.mode, seed=config.seed,
        projection_tol=config.projection_tol,
    )


def approximate(body, config: DudleyConfig) -> tuple[Construction, ApproximationReport]:
    """Build the halfspace approximation and verify it.

    Returns the full construction (packing, contacts, halfspaces) plus a
    report with the halfspace count, the count envelope, an exact containment
    check and a sampled Hausdorff estimate.  Identical inputs give identical
    constructions.
    """
    t0 = time.perf_counter()
    dim = body.dim
    if config.mode == MODE_EXACT:
        sw = validate_sandwich(body, dim)
        if not sw.ok:
            raise SandwichError(
                f"body violates the exact-mode hypothesis: inradius "
                f"{sw.inradius:.9g} (needs >= 1), circumradius "
                f"{sw.circumradius:.9g} (needs <= {dim})")
        center = np.zeros(dim)
        sphere_radius = 2.0 * dim
        delta = math.sqrt(dim * config.epsilon / 8.0)
    else:
        center, R = _centroid_and_circumradius(body)
        if R <= 1e-12:
            raise GeometryError("body has zero circumradius; nothing to approximate")
        sphere_radius = 2.0 * R
        delta = math.sqrt(R * config.epsilon / 12.0)

    packing = build_packing(
        dim, center, sphere_radius, delta, config.seed,
        rejection_stop=config.rejection_stop,
        coverage_samples=config.coverage_samples,
    )
    construction = assemble_construction(body, packing, config)
    D = construction.result

    containment = check_containment(body, D, 1e-8)
    try:
        hg = hausdorff_gap(body, D, config.report_directions,
                           config.seed + _TAG_REPORT)
        estimate = hg.estimate
    except UnboundedError:
        estimate = math.inf
    report = ApproximationReport(
        halfspace_count=len(D),
        delta=delta,
        epsilon=config.epsilon,
        dim=dim,
        theoretical_envelope=packing_cardinality_bound(dim, sphere_radius, delta),
        containment_ok=containment.ok,
        hausdorff_estimate=estimate,
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )
    return construction, report


def _sin_gamma_bound(construction: Construction) -> float:
    if construction.mode == MODE_EXACT:
        return 4.0 * construction.delta / construction.dim
    # generalized sphere radius is twice the circumradius R: 6 delta / R
    return 12.0 * construction.delta / construction.sphere_radius


def audit_proof(construction: Construction, n_samples: int, seed: int,
                *, workers: int | None = None) -> ProofAudit:
    """Sample boundary points and replay the gap analysis at each.

    Checks per sample: (coverage) the sphere hit lies within delta of its
    nearest packing point; (contraction) the boundary point lies within that
    distance, plus projection slack, of the contact; (chord) the difference
    of the two chords is at most 2*delta; (angle) the angle between them obeys
    the mode's sine bound; (halfspace) the boundary point is within eps/2 of
    the supporting hyperplane it is charged to.
    """
    if n_samples < 1:
        raise GeometryError("n_samples must be at least 1")
    wk = resolve_workers(workers)
    body = construction.body
    dim = construction.dim
    delta = construction.delta
    rho = construction.sphere_radius
    sc = construction.sphere_center

    rng = np.random.default_rng(subseed(seed, _TAG_AUDIT))
    U = rng.standard_normal((n_samples, dim))
    norms = np.linalg.norm(U, axis=1)
    small = norms < 1e-12
    U[small] = 0.0
    U[small, 0] = 1.0
    norms[small] = 1.0
    U /= norms[:, None]

    _, P = support_batch(body, U)

    # Shoot the outward ray from p to the sphere: |w + t u| = rho, t > 0.
    W = P - sc
    bq = np.einsum("ij,ij->i", W, U)
    cq = np.einsum("ij,ij->i", W, W) - rho * rho
    disc = np.sqrt(np.maximum(bq * bq - cq, 0.0))
    t = -bq + disc
    P_prime = P + t[:, None] * U

    tree = cKDTree(construction.packing.points)
    gap_pprime_q, idx = tree.query(P_prime, k=1, workers=wk)
    Q = construction.packing.points[idx]
    NQ = construction.nqs[idx]

    gap_p_nq = np.linalg.norm(P - NQ, axis=1)
    X = Q - NQ
    Y = P_prime - P
    ell = np.linalg.norm(X - Y, axis=1)
    nx = np.linalg.norm(X, axis=1)
    ny = np.linalg.norm(Y, axis=1)
    denom = np.maximum(nx * ny, 1e-300)
    cosg = np.clip(np.einsum("ij,ij->i", X, Y) / denom, -1.0, 1.0)
    sin_gamma = np.sqrt(np.maximum(1.0 - cosg * cosg, 0.0))

    normals = construction.result.A[idx]
    offsets = construction.result.b[idx]
    dist_p_boundary = np.abs(np.einsum("ij,ij->i", normals, P) - offsets)

    sin_bound = _sin_gamma_bound(construction)
    ptol = construction.projection_tol
    eps = construction.epsilon

    fails = {
        "coverage": gap_pprime_q > delta + AUDIT_TOL,
        "contraction": gap_p_nq > gap_pprime_q + 2.0 * ptol + AUDIT_TOL,
        "chord": ell > 2.0 * delta + AUDIT_TOL,
        "angle": sin_gamma > sin_bound + AUDIT_TOL,
        "halfspace": dist_p_boundary > 0.5 * eps + AUDIT_TOL,
    }
    check_violations = {name: np.flatnonzero(mask).tolist()
                        for name, mask in fails.items()}
    any_fail = np.zeros(n_samples, dtype=bool)
    for mask in fails.values():
        any_fail |= mask
    violations = tuple(int(i) for i in np.flatnonzero(any_fail))

    thresholds = {
        "delta": delta,
        "epsilon": eps,
        "sin_bound": sin_bound,
        "projection_tol": ptol,
        "tol": AUDIT_TOL,
    }
    return ProofAudit(
        p=P, v=U, p_prime=P_prime, q=Q, nq=NQ,
        gap_pprime_q=gap_pprime_q, gap_p_nq=gap_p_nq, ell=ell,
        sin_gamma=sin_gamma, dist_p_boundary=dist_p_boundary,
        violations=violations, check_violations=check_violations,
        thresholds=thresholds,
    )
