"""JSON (de)serialization for bodies, packings, constructions, and reports.

All floats are written with 17 significant digits so that identical inputs
produce byte-identical files and every value round-trips exactly.  The
encoder is hand-rolled because the stdlib encoder exposes no hook for float
formatting.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import FormatError
from .geometry import Ball, Halfspace, HPolytope, VPolytope
from .packing import SpherePacking


def float_repr(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _encode(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), out)
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(float_repr(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif obj is None:
        out.append("null")
    else:
        raise FormatError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj) -> str:
    parts: list[str] = []
    _encode(obj, parts)
    return "".join(parts)


def dump(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc


def _load_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return _loads(fh.read())


def _require(d: dict, key: str, path: str = "document"):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"{path} is missing required key {key!r}")
    return d[key]


def _as_float_array(value, shape_hint: str):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{shape_hint} is not a numeric array") from exc
    if not np.all(np.isfinite(arr)):
        raise FormatError(f"{shape_hint} contains non-finite entries")
    return arr


# ---------------------------------------------------------------- bodies


def body_to_dict(body) -> dict:
    if isinstance(body, Ball):
        return {"type": "ball", "dim": body.dim,
                "center": body.center, "radius": body.radius}
    if isinstance(body, VPolytope):
        return {"type": "vpolytope", "dim": body.dim, "vertices": body.vertices}
    raise FormatError(f"unsupported body type {type(body).__name__}")


def body_from_dict(d: dict):
    kind = _require(d, "type", "body")
    if kind == "ball":
        center = _as_float_array(_require(d, "center", "body"), "center")
        radius = _require(d, "radius", "body")
        if center.ndim != 1:
            raise FormatError("ball center must be a flat vector")
        try:
            return Ball(center=center, radius=float(radius))
        except Exception as exc:
            raise FormatError(f"invalid ball: {exc}") from exc
    if kind == "vpolytope":
        verts = _as_float_array(_require(d, "vertices", "body"), "vertices")
        if verts.ndim != 2:
            raise FormatError("vertices must be a list of points")
        try:
            return VPolytope(vertices=verts)
        except Exception as exc:
            raise FormatError(f"invalid vpolytope: {exc}") from exc
    raise FormatError(f"unknown body type {kind!r}")


def load_body(path):
    return body_from_dict(_load_file(path))


# ------------------------------------------------------------ halfspaces


def hpolytope_to_dict(D: HPolytope) -> dict:
    return {"dim": D.dim,
            "halfspaces": [{"normal": h.normal, "offset": h.offset}
                           for h in D.halfspaces]}


def hpolytope_from_dict(d: dict) -> HPolytope:
    if isinstance(d, dict) and isinstance(d.get("halfspaces"), dict):
        d = d["halfspaces"]  # accept a full construction bundle too
    dim = _require(d, "dim", "halfspace list")
    entries = _require(d, "halfspaces", "halfspace list")
    if not isinstance(entries, list) or not entries:
        raise FormatError("halfspace list must contain at least one halfspace")
    hs = []
    for i, e in enumerate(entries):
        normal = _as_float_array(_require(e, "normal", f"halfspace {i}"),
                                 f"halfspace {i} normal")
        offset = _require(e, "offset", f"halfspace {i}")
        if normal.shape != (int(dim),):
            raise FormatError(f"halfspace {i} normal has wrong dimension")
        try:
            hs.append(Halfspace(normal=normal, offset=float(offset)))
        except Exception as exc:
            raise FormatError(f"invalid halfspace {i}: {exc}") from exc
    return HPolytope(tuple(hs))


def load_hpolytope(path) -> HPolytope:
    return hpolytope_from_dict(_load_file(path))


# --------------------------------------------------------------- packing


def packing_to_dict(p: SpherePacking) -> dict:
    return {"dim": p.dim, "center": p.center, "radius": p.radius,
            "delta": p.delta, "seed": p.seed, "points": p.points}


def packing_from_dict(d: dict) -> SpherePacking:
    dim = int(_require(d, "dim", "packing"))
    center = _as_float_array(_require(d, "center", "packing"), "packing center")
    points = _as_float_array(_require(d, "points", "packing"), "packing points")
    if points.ndim != 2 or points.shape[1] != dim or center.shape != (dim,):
        raise FormatError("packing points/center shape mismatch")
    try:
        return SpherePacking(
            points=points, center=center,
            radius=float(_require(d, "radius", "packing")),
            delta=float(_require(d, "delta", "packing")),
            seed=int(_require(d, "seed", "packing")))
    except FormatError:
        raise
    except Exception as exc:
        raise FormatError(f"invalid packing: {exc}") from exc


def load_packing(path) -> SpherePacking:
    return packing_from_dict(_load_file(path))


# ---------------------------------------------------------- construction


def construction_to_dict(c) -> dict:
    return {
        "body": body_to_dict(c.body),
        "packing": packing_to_dict(c.packing),
        "contacts": [[q, nq] for q, nq in c.contacts],
        "halfspaces": hpolytope_to_dict(c.result),
        "epsilon": c.epsilon,
        "mode": c.mode,
        "seed": c.seed,
        "projection_tol": c.projection_tol,
    }


def construction_from_dict(d: dict):
    from .approx import MODES, Construction  # local import to avoid a cycle

    body = body_from_dict(_require(d, "body", "construction"))
    packing = packing_from_dict(_require(d, "packing", "construction"))
    D = hpolytope_from_dict(_require(d, "halfspaces", "construction"))
    contacts = _require(d, "contacts", "construction")
    if len(contacts) != len(packing.points) or len(D) != len(packing.points):
        raise FormatError("construction arrays are not aligned")
    nqs = _as_float_array([pair[1] for pair in contacts], "contacts")
    if nqs.shape != packing.points.shape:
        raise FormatError("contact points have wrong shape")
    mode = _require(d, "mode", "construction")
    if mode not in MODES:
        raise FormatError(f"unknown mode {mode!r}")
    return Construction(
        body=body, packing=packing, nqs=nqs, result=D,
        delta=packing.delta, sphere_radius=packing.radius,
        sphere_center=packing.center.copy(),
        epsilon=float(_require(d, "epsilon", "construction")),
        mode=mode, seed=int(_require(d, "seed", "construction")),
        projection_tol=float(_require(d, "projection_tol", "construction")),
    )


def load_construction(path):
    return construction_from_dict(_load_file(path))


# --------------------------------------------------------------- reports


def report_to_dict(r) -> dict:
    return {
        "halfspace_count": r.halfspace_count,
        "delta": r.delta,
        "epsilon": r.epsilon,
        "dim": r.dim,
        "theoretical_envelope": r.theoretical_envelope,
        "containment_ok": r.containment_ok,
        "hausdorff_estimate": r.hausdorff_estimate,
        "runtime_ms": r.runtime_ms,
    }


def audit_to_dict(a) -> dict:
    return {
        "n_samples": a.n_samples,
        "thresholds": dict(a.thresholds),
        "violations": list(a.violations),
        "check_violations": {k: list(v) for k, v in a.check_violations.items()},
        "samples": {
            "p": a.p, "v": a.v, "p_prime": a.p_prime,
            "q": a.q, "nq": a.nq,
            "gap_pprime_q": a.gap_pprime_q,
            "gap_p_nq": a.gap_p_nq,
            "ell": a.ell,
            "sin_gamma": a.sin_gamma,
            "dist_p_boundary": a.dist_p_boundary,
        },
    }
