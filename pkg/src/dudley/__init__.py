"""Outer approximation of convex bodies by few supporting halfspaces.

Given a convex body C in R^d and a target eps, the package produces an
intersection D of O(eps^-(d-1)/2) halfspaces with C inside D inside the
eps-neighborhood of C, plus independent verification (containment, sampled
and exact-2d Hausdorff gaps), a pointwise audit of the error analysis,
benchmarking, and 2-d SVG rendering.
"""

from .approx import (
    AUDIT_TOL,
    MODE_EXACT,
    MODE_GENERAL,
    ApproximationReport,
    Construction,
    DudleyConfig,
    ProofAudit,
    SandwichReport,
    approximate,
    assemble_construction,
    audit_proof,
    validate_sandwich,
)
from .errors import (
    DimensionMismatchError,
    DudleyError,
    FormatError,
    GeometryError,
    InfeasibleError,
    LPError,
    PackingError,
    ProjectionError,
    SandwichError,
    UnboundedError,
)
from .geometry import (
    Ball,
    ExpandedBody,
    Halfspace,
    HPolytope,
    VPolytope,
    expand_body,
    halfspace_through,
    signed_distance,
    support,
    support_batch,
)
from .linprog import (
    LPResult,
    SupportSweep,
    chebyshev_center,
    lp_feasible,
    lp_maximize,
)
from .packing import (
    PackingReport,
    SpherePacking,
    build_packing,
    packing_cardinality_bound,
    verify_packing,
)
from .projection import ProjectionResult, project, project_batch
from .verify import (
    ContainmentReport,
    HausdorffReport,
    check_containment,
    enumerate_vertices_2d,
    exact_gap_2d,
    hausdorff_gap,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximationReport",
    "Ball",
    "Construction",
    "ContainmentReport",
    "DimensionMismatchError",
    "DudleyConfig",
    "DudleyError",
    "ExpandedBody",
    "FormatError",
    "GeometryError",
    "Halfspace",
    "HPolytope",
    "HausdorffReport",
    "InfeasibleError",
    "LPError",
    "LPResult",
    "AUDIT_TOL",
    "MODE_EXACT",
    "MODE_GENERAL",
    "PackingError",
    "PackingReport",
    "ProjectionError",
    "ProjectionResult",
    "ProofAudit",
    "SandwichError",
    "SandwichReport",
    "SpherePacking",
    "SupportSweep",
    "UnboundedError",
    "VPolytope",
    "approximate",
    "assemble_construction",
    "audit_proof",
    "build_packing",
    "chebyshev_center",
    "check_containment",
    "enumerate_vertices_2d",
    "exact_gap_2d",
    "expand_body",
    "halfspace_through",
    "hausdorff_gap",
    "lp_feasible",
    "lp_maximize",
    "packing_cardinality_bound",
    "project",
    "project_batch",
    "signed_distance",
    "support",
    "support_batch",
    "validate_sandwich",
    "verify_packing",
    "__version__",
]
