import numpy as np
import pytest

from dudley import (
    Halfspace,
    HPolytope,
    InfeasibleError,
    SupportSweep,
    UnboundedError,
    chebyshev_center,
    lp_feasible,
    lp_maximize,
    signed_distance,
)

from conftest import random_contained_polytope_2d
from oracles import support_brute_2d


class TestLpMaximize:
    def test_square_axis(self, square_hpoly):
        res = lp_maximize([1.0, 0.0], square_hpoly)
        assert res.status == "optimal"
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_unbounded_detected(self):
        P = HPolytope([Halfspace(np.array([1.0, 0.0]), 1.0)])
        assert lp_maximize([0.0, 1.0], P).status == "unbounded"

    def test_triangle_hypotenuse(self, triangle_hpoly):
        res = lp_maximize([1.0, 1.0], triangle_hpoly)
        assert res.status == "optimal"
        assert res.value == pytest.approx(1.0, abs=1e-9)
        x = res.point
        assert x.sum() == pytest.approx(1.0, abs=1e-8)  # on the hypotenuse

    def test_infeasible_detected(self):
        P = HPolytope([Halfspace(np.array([1.0, 0.0]), 1.0),
                       Halfspace(np.array([-1.0, 0.0]), -2.0)])
        assert lp_maximize([1.0, 0.0], P).status == "infeasible"

    def test_optimal_point_is_feasible(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            P = random_contained_polytope_2d(rng, int(rng.integers(3, 9)))
            u = rng.normal(size=2)
            res = lp_maximize(u, P)
            assert res.status == "optimal"
            assert np.all(P.A @ res.point <= P.b + 1e-8)

    def test_agrees_with_pairwise_oracle(self):
        # Dense sample here; the acceptance suite runs the full 1,000.
        rng = np.random.default_rng(11)
        for _ in range(250):
            P = random_contained_polytope_2d(rng, int(rng.integers(3, 10)))
            u = rng.normal(size=2)
            if np.linalg.norm(u) < 1e-6:
                continue
            expected = support_brute_2d(P.A, P.b, u)
            assert expected is not None
            res = lp_maximize(u, P)
            assert res.status == "optimal"
            assert res.value == pytest.approx(expected, abs=1e-7)


class TestChebyshevCenter:
    def test_square(self, square_hpoly):
        center, r = chebyshev_center(square_hpoly)
        assert np.allclose(center, 0.0, atol=1e-9)
        assert r == pytest.approx(1.0, abs=1e-9)

    def test_right_triangle_inradius(self, triangle_hpoly):
        _, r = chebyshev_center(triangle_hpoly)
        assert r == pytest.approx((2.0 - np.sqrt(2.0)) / 2.0, abs=1e-9)

    def test_shifted_square(self):
        hs = [
            Halfspace(np.array([1.0, 0.0]), 6.0),
            Halfspace(np.array([-1.0, 0.0]), -4.0),
            Halfspace(np.array([0.0, 1.0]), 1.0),
            Halfspace(np.array([0.0, -1.0]), 1.0),
        ]
        center, r = chebyshev_center(HPolytope(hs))
        assert np.allclose(center, [5.0, 0.0], atol=1e-8)
        assert r == pytest.approx(1.0, abs=1e-9)

    def test_ball_contained(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            P = random_contained_polytope_2d(rng, int(rng.integers(4, 9)))
            center, r = chebyshev_center(P)
            for h in P.halfspaces:
                assert signed_distance(h, center) <= -r + 1e-8

    def test_translation_equivariance(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            P = random_contained_polytope_2d(rng, 6)
            t = rng.normal(size=2)
            shifted = HPolytope([Halfspace(h.normal, h.offset + float(h.normal @ t))
                                 for h in P.halfspaces])
            c0, r0 = chebyshev_center(P)
            c1, r1 = chebyshev_center(shifted)
            assert np.allclose(c1, c0 + t, atol=1e-8)
            assert r1 == pytest.approx(r0, abs=1e-8)

    def test_unbounded_rejected(self):
        P = HPolytope([Halfspace(np.array([1.0, 0.0]), 1.0)])
        with pytest.raises(UnboundedError):
            chebyshev_center(P)

    def test_infeasible_rejected(self):
        P = HPolytope([Halfspace(np.array([1.0, 0.0]), 1.0),
                       Halfspace(np.array([-1.0, 0.0]), -2.0)])
        with pytest.raises((InfeasibleError, UnboundedError)):
            chebyshev_center(P)


class TestLpFeasible:
    def test_contradictory_slabs(self):
        P = HPolytope([Halfspace(np.array([1.0, 0.0]), 1.0),
                       Halfspace(np.array([-1.0, 0.0]), -2.0)])
        assert lp_feasible(P) is False

    def test_single_halfspace(self):
        assert lp_feasible(HPolytope([Halfspace(np.array([1.0, 0.0]), 1.0)])) is True

    def test_origin_witness(self):
        rng = np.random.default_rng(14)
        for _ in range(30):
            P = random_contained_polytope_2d(rng, int(rng.integers(3, 12)))
            assert lp_feasible(P) is True


class TestSupportSweep:
    def test_matches_lp_maximize(self):
        rng = np.random.default_rng(15)
        P = random_contained_polytope_2d(rng, 12)
        U = rng.normal(size=(500, 2))
        U /= np.linalg.norm(U, axis=1)[:, None]
        sweep = SupportSweep(P)
        got = sweep.values(U)
        for u, v in zip(U, got):
            assert v == pytest.approx(lp_maximize(u, P).value, abs=1e-9)

    def test_cache_warm_run_consistent(self):
        # Warm lookups may reassociate the dot product (1-ulp wiggle); a
        # fresh sweep over the same inputs is what determinism promises.
        rng = np.random.default_rng(16)
        P = random_contained_polytope_2d(rng, 8)
        U = rng.normal(size=(300, 2))
        sweep = SupportSweep(P)
        first = sweep.values(U)
        second = sweep.values(U)  # now fully cached
        np.testing.assert_allclose(second, first, rtol=1e-12, atol=1e-12)
        fresh = SupportSweep(P).values(U)
        np.testing.assert_array_equal(first, fresh)

    def test_unbounded_direction_raises(self):
        P = HPolytope([Halfspace(np.array([1.0, 0.0]), 1.0)])
        with pytest.raises(UnboundedError):
            SupportSweep(P).values(np.array([[0.0, 1.0]]))
