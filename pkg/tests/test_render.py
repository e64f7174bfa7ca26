"""SVG rendering: structure, determinism, and geometric placement."""

import numpy as np
import pytest

from dudley import (
    Ball,
    DimensionMismatchError,
    DudleyConfig,
    GeometryError,
    VPolytope,
    approximate,
    exact_gap_2d,
)
from dudley.render import hull_vertices_from_svg, render_svg


def _polygon_points(text: str, cls: str) -> np.ndarray:
    marker = f'class="{cls}" points="'
    start = text.find(marker)
    assert start >= 0, f"no {cls} polygon in SVG"
    start += len(marker)
    end = text.index('"', start)
    return np.array([tuple(map(float, tok.split(",")))
                     for tok in text[start:end].split()])


@pytest.fixture(scope="module")
def disk_svg_parts():
    body = Ball(center=np.zeros(2), radius=1.0)
    cons, _ = approximate(body, DudleyConfig(epsilon=0.15, seed=3))
    svg = render_svg(body, cons.result, cons.epsilon, packing=cons.packing)
    return body, cons, svg


def test_svg_document_structure(disk_svg_parts):
    _, cons, svg = disk_svg_parts
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg"')
    assert svg.rstrip().endswith("</svg>")
    for cls in ("body", "shell", "hull"):
        assert svg.count(f'class="{cls}"') == 1
    assert svg.count("<circle") == len(cons.packing.points)


def test_render_is_deterministic(disk_svg_parts):
    body, cons, svg = disk_svg_parts
    again = render_svg(body, cons.result, cons.epsilon, packing=cons.packing)
    assert again == svg


def test_hull_sits_between_body_and_shell(disk_svg_parts):
    # The rendering transform is a uniform scale plus a flip, so distance
    # ratios survive: hull vertices of a disk run must lie outside the
    # body circle and inside the eps shell, and the worst pixel overrun
    # must reproduce the exact Hausdorff gap once rescaled.
    body, cons, svg = disk_svg_parts
    bodypts = _polygon_points(svg, "body")
    hull = hull_vertices_from_svg(svg)
    c = bodypts.mean(axis=0)
    r_px = np.linalg.norm(bodypts - c, axis=1).mean()

    d = np.linalg.norm(hull - c, axis=1)
    assert np.all(d >= r_px * (1.0 - 1e-6))
    assert np.all(d <= r_px * (1.0 + cons.epsilon) * (1.0 + 1e-6))

    gap_px = (d.max() - r_px) / r_px  # world units: body radius is 1
    gap = exact_gap_2d(body, cons.result)
    assert abs(gap_px - gap) < 1e-4


def test_shell_matches_hausdorff_radius(disk_svg_parts):
    body, cons, svg = disk_svg_parts
    bodypts = _polygon_points(svg, "body")
    shell = _polygon_points(svg, "shell")
    c = bodypts.mean(axis=0)
    r_px = np.linalg.norm(bodypts - c, axis=1).mean()
    d = np.linalg.norm(shell - c, axis=1)
    assert np.allclose(d, r_px * (1.0 + cons.epsilon), rtol=1e-6)


def test_eps_zero_shell_coincides_with_body():
    body = Ball(center=np.zeros(2), radius=1.0)
    cons, _ = approximate(body, DudleyConfig(epsilon=0.4, seed=1))
    svg = render_svg(body, cons.result, 0.0)
    bodypts = _polygon_points(svg, "body")
    shell = _polygon_points(svg, "shell")
    assert bodypts.shape == shell.shape
    assert np.allclose(bodypts, shell, atol=1e-6)


def test_square_body_outline_uses_its_vertices(unit_square):
    cons, _ = approximate(unit_square, DudleyConfig(epsilon=0.3, seed=2))
    svg = render_svg(unit_square, cons.result, cons.epsilon)
    bodypts = _polygon_points(svg, "body")
    assert len(bodypts) == 4
    c = bodypts.mean(axis=0)
    # All four corners at equal pixel radius, in cyclic angular order.
    rad = np.linalg.norm(bodypts - c, axis=1)
    assert np.allclose(rad, rad[0], rtol=1e-6)
    ang = np.arctan2(*(bodypts - c).T[::-1])
    assert np.all(np.diff(np.unwrap(ang)) != 0.0)


def test_packing_omitted_when_not_given():
    body = Ball(center=np.zeros(2), radius=1.0)
    cons, _ = approximate(body, DudleyConfig(epsilon=0.4, seed=1))
    svg = render_svg(body, cons.result, cons.epsilon)
    assert "<circle" not in svg and 'class="packing"' not in svg


def test_render_rejects_bad_inputs(square_hpoly):
    ball3 = Ball(center=np.zeros(3), radius=1.0)
    with pytest.raises(DimensionMismatchError):
        render_svg(ball3, square_hpoly, 0.1)
    body = Ball(center=np.zeros(2), radius=1.0)
    with pytest.raises(GeometryError):
        render_svg(body, square_hpoly, -0.1)


def test_render_rejects_3d_hull():
    from dudley import Halfspace, HPolytope
    body = Ball(center=np.zeros(2), radius=1.0)
    D3 = HPolytope(tuple(
        Halfspace(normal=e, offset=1.0)
        for e in np.vstack([np.eye(3), -np.eye(3)])))
    with pytest.raises(DimensionMismatchError):
        render_svg(body, D3, 0.1)


def test_hull_parser_requires_hull_polygon():
    with pytest.raises(GeometryError):
        hull_vertices_from_svg("<svg></svg>")
