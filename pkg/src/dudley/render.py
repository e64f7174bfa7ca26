"""Flat SVG rendering of a 2-d body, its halfspace hull, and the eps shell.

The body is drawn filled, the halfspace intersection as a stroked polygon
(vertices from the exact 2-d enumeration), and the outer parallel body at
distance eps as a dashed curve traced by support witnesses pushed out along
a fixed angular grid.  Output is a plain string with no timestamps or
randomness, so a given input always renders to identical bytes.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, GeometryError
from .geometry import Ball, VPolytope, support
from .verify import enumerate_vertices_2d

_SHELL_STEPS = 720

_STYLE = {
    "body_fill": "#9ecae1",
    "body_stroke": "#3182bd",
    "hull_stroke": "#e6550d",
    "shell_stroke": "#31a354",
    "packing_fill": "#636363",
}


def _fmt(x: float) -> str:
    return format(float(x), ".8g")


def _points_attr(pts: np.ndarray) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)


def _body_outline(body) -> np.ndarray:
    if isinstance(body, Ball):
        ang = np.linspace(0.0, 2.0 * np.pi, _SHELL_STEPS, endpoint=False)
        ring = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return body.center + body.radius * ring
    c = body.vertices.mean(axis=0)
    rel = body.vertices - c
    order = np.argsort(np.arctan2(rel[:, 1], rel[:, 0]), kind="stable")
    return body.vertices[order]


def _shell_outline(body, eps: float) -> np.ndarray:
    ang = np.linspace(0.0, 2.0 * np.pi, _SHELL_STEPS, endpoint=False)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    pts = np.empty_like(dirs)
    for i, u in enumerate(dirs):
        _, w = support(body, u)
        pts[i] = w + eps * u
    return pts


def render_svg(body, D, eps: float, packing=None, width: int = 640) -> str:
    """Render C, D, and the eps shell to an SVG document string."""
    if body.dim != 2:
        raise DimensionMismatchError("rendering is 2-d only")
    if D.dim != 2:
        raise DimensionMismatchError("halfspace hull must be 2-d")
    if eps < 0:
        raise GeometryError("eps must be nonnegative")

    hull = enumerate_vertices_2d(D)
    outline = _body_outline(body)
    shell = _shell_outline(body, eps)
    groups = [outline, shell, hull]
    pk = None
    if packing is not None:
        pk = np.asarray(packing.points if hasattr(packing, "points") else packing,
                        dtype=float)
        groups.append(pk)

    allpts = np.vstack(groups)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    pad = 0.05 * span
    scale = width / (span + 2.0 * pad)

    def to_px(pts: np.ndarray) -> np.ndarray:
        out = np.empty_like(pts)
        out[:, 0] = (pts[:, 0] - lo[0] + pad) * scale
        out[:, 1] = (hi[1] - pts[:, 1] + pad) * scale  # svg y grows downward
        return out

    height = (hi[1] - lo[1] + 2.0 * pad) * scale
    sw = _fmt(0.004 * width)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{_fmt(height)}" viewBox="0 0 {width} {_fmt(height)}">',
        f'<polygon class="body" points="{_points_attr(to_px(outline))}" '
        f'fill="{_STYLE["body_fill"]}" stroke="{_STYLE["body_stroke"]}" '
        f'stroke-width="{sw}"/>',
        f'<polygon class="shell" points="{_points_attr(to_px(shell))}" '
        f'fill="none" stroke="{_STYLE["shell_stroke"]}" stroke-width="{sw}" '
        f'stroke-dasharray="{_fmt(0.012 * width)} {_fmt(0.008 * width)}"/>',
        f'<polygon class="hull" points="{_points_attr(to_px(hull))}" '
        f'fill="none" stroke="{_STYLE["hull_stroke"]}" stroke-width="{sw}"/>',
    ]
    if pk is not None:
        dots = to_px(pk)
        r = _fmt(0.006 * width)
        lines.append('<g class="packing">')
        for x, y in dots:
            lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" '
                         f'fill="{_STYLE["packing_fill"]}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def hull_vertices_from_svg(text: str) -> np.ndarray:
    """Parse the hull polygon's pixel coordinates back out of an SVG string.

    Inverse of the rendering transform is not applied; callers compare
    shapes, not world coordinates.
    """
    marker = 'class="hull" points="'
    start = text.find(marker)
    if start < 0:
        raise GeometryError("no hull polygon in SVG")
    start += len(marker)
    end = text.index('"', start)
    pairs = [tuple(map(float, tok.split(","))) for tok in text[start:end].split()]
    return np.array(pairs)
