import math

import numpy as np
import pytest

from dudley import (
    AUDIT_TOL,
    Ball,
    DudleyConfig,
    GeometryError,
    MODE_EXACT,
    MODE_GENERAL,
    SandwichError,
    VPolytope,
    approximate,
    audit_proof,
    packing_cardinality_bound,
    signed_distance,
    support,
    validate_sandwich,
)


@pytest.fixture(scope="module")
def disk_run():
    body = Ball(np.zeros(2), 1.0)
    cfg = DudleyConfig(epsilon=0.1, mode=MODE_EXACT, seed=7)
    return body, *approximate(body, cfg)


class TestValidateSandwich:
    def test_unit_disk_passes(self):
        rep = validate_sandwich(Ball(np.zeros(2), 1.0), 2)
        assert rep.ok
        assert rep.inradius == pytest.approx(1.0, abs=1e-9)
        assert rep.circumradius == pytest.approx(1.0, abs=1e-9)

    def test_big_square_fails_circumradius(self):
        body = VPolytope(1.5 * np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]))
        rep = validate_sandwich(body, 2)
        assert not rep.ok
        assert rep.inradius == pytest.approx(1.5, abs=1e-9)
        assert rep.circumradius == pytest.approx(1.5 * math.sqrt(2.0), abs=1e-9)

    def test_shifted_ball_fails_inradius(self):
        rep = validate_sandwich(Ball(np.array([0.5, 0.0]), 1.0), 2)
        assert not rep.ok
        assert rep.inradius == pytest.approx(0.5, abs=1e-9)

    def test_square_meets_hypothesis(self, unit_square):
        rep = validate_sandwich(unit_square, 2)
        assert rep.ok
        assert rep.inradius == pytest.approx(1.0, abs=1e-9)
        assert rep.circumradius == pytest.approx(math.sqrt(2.0), abs=1e-9)


class TestConfig:
    def test_epsilon_positive(self):
        with pytest.raises(GeometryError):
            DudleyConfig(epsilon=0.0)

    def test_mode_checked(self):
        with pytest.raises(GeometryError):
            DudleyConfig(epsilon=0.1, mode="fancy")

    def test_projection_tol_positive(self):
        with pytest.raises(GeometryError):
            DudleyConfig(epsilon=0.1, projection_tol=0.0)


class TestApproximate:
    def test_disk_parameters(self, disk_run):
        _, cons, rep = disk_run
        assert cons.delta == pytest.approx(math.sqrt(2.0 * 0.1 / 8.0), abs=1e-12)
        assert cons.sphere_radius == 4.0
        assert np.allclose(cons.sphere_center, 0.0)
        assert rep.halfspace_count == len(cons.result) == len(cons.packing)
        assert rep.theoretical_envelope == pytest.approx(
            packing_cardinality_bound(2, 4.0, cons.delta))

    def test_disk_guarantee(self, disk_run):
        _, cons, rep = disk_run
        assert rep.containment_ok
        assert rep.hausdorff_estimate <= 0.1
        assert rep.runtime_ms > 0.0

    def test_halfspace_structure(self, disk_run):
        body, cons, _ = disk_run
        for (q, nq), h in zip(cons.contacts, cons.result.halfspaces):
            # boundary passes through the contact point
            assert abs(signed_distance(h, nq)) <= 1e-8
            # normal is parallel to q - nq
            w = q - nq
            w = w / np.linalg.norm(w)
            assert min(np.linalg.norm(h.normal - w), np.linalg.norm(h.normal + w)) <= 1e-9

    def test_halfspaces_support_body(self, disk_run):
        body, cons, _ = disk_run
        for h in cons.result.halfspaces:
            value, _ = support(body, h.normal)
            assert value <= h.offset + 1e-8

    def test_every_contact_on_body_boundary(self, disk_run):
        body, cons, _ = disk_run
        for _, nq in cons.contacts:
            assert np.linalg.norm(nq) == pytest.approx(1.0, abs=1e-7)

    def test_sandwich_gate(self):
        with pytest.raises(SandwichError):
            approximate(Ball(np.array([0.5, 0.0]), 1.0),
                        DudleyConfig(epsilon=0.1, mode=MODE_EXACT))

    def test_degenerate_budget_single_halfspace(self):
        # Enormous epsilon in d=1: one packing point, one halfspace, C inside.
        body = VPolytope(np.array([[-1.0], [1.0]]))
        cons, rep = approximate(body, DudleyConfig(epsilon=200.0, mode=MODE_EXACT))
        assert len(cons.result) == 1
        assert rep.containment_ok
        assert np.isinf(rep.hausdorff_estimate)  # a single halfspace is unbounded

    def test_generalized_off_center(self):
        body = Ball(np.array([3.0, 0.0]), 0.5)
        cons, rep = approximate(body, DudleyConfig(epsilon=0.1, mode=MODE_GENERAL, seed=2))
        assert cons.delta == pytest.approx(math.sqrt(0.5 * 0.1 / 12.0), abs=1e-12)
        assert cons.sphere_radius == pytest.approx(1.0)
        assert np.allclose(cons.sphere_center, [3.0, 0.0])
        assert rep.containment_ok
        assert rep.hausdorff_estimate <= 0.1

    def test_generalized_polytope(self):
        rng = np.random.default_rng(21)
        body = VPolytope(rng.normal(size=(7, 2)) + np.array([4.0, -2.0]))
        cons, rep = approximate(body, DudleyConfig(epsilon=0.2, mode=MODE_GENERAL, seed=3))
        assert rep.containment_ok
        assert rep.hausdorff_estimate <= 0.2

    def test_determinism(self):
        body = Ball(np.zeros(2), 1.0)
        cfg = DudleyConfig(epsilon=0.2, mode=MODE_EXACT, seed=11)
        c1, r1 = approximate(body, cfg)
        c2, r2 = approximate(body, cfg)
        np.testing.assert_array_equal(c1.packing.points, c2.packing.points)
        np.testing.assert_array_equal(c1.result.A, c2.result.A)
        np.testing.assert_array_equal(c1.result.b, c2.result.b)
        assert r1.hausdorff_estimate == r2.hausdorff_estimate


class TestAuditProof:
    def test_disk_audit_clean(self, disk_run):
        _, cons, _ = disk_run
        audit = audit_proof(cons, 10_000, seed=7)
        assert audit.violations == ()
        for name, idx in audit.check_violations.items():
            assert len(idx) == 0, name
        assert audit.n_samples == 10_000
        assert np.isfinite(audit.sin_gamma).all()
        assert np.isfinite(audit.ell).all()

    def test_audit_thresholds_reported(self, disk_run):
        _, cons, _ = disk_run
        audit = audit_proof(cons, 100, seed=0)
        # exact-mode angle bound is 4 delta / d
        assert audit.thresholds["delta"] == pytest.approx(cons.delta)
        assert audit.thresholds["sin_bound"] == pytest.approx(4 * cons.delta / 2.0)
        assert audit.thresholds["epsilon"] == pytest.approx(0.1)
        assert audit.thresholds["tol"] == AUDIT_TOL

    def test_single_sample_smoke(self, disk_run):
        _, cons, _ = disk_run
        audit = audit_proof(cons, 1, seed=0)
        assert audit.n_samples == 1
        assert len(audit.violations) <= 1
        for arr in (audit.gap_pprime_q, audit.gap_p_nq, audit.ell,
                    audit.sin_gamma, audit.dist_p_boundary):
            assert np.isfinite(arr).all()

    def test_bad_sample_count(self, disk_run):
        _, cons, _ = disk_run
        with pytest.raises(GeometryError):
            audit_proof(cons, 0, seed=0)

    def test_corrupted_packing_detected(self, disk_run):
        from dudley import SpherePacking, assemble_construction
        body, cons, _ = disk_run
        rng = np.random.default_rng(5)
        keep = rng.permutation(len(cons.packing))[: int(0.7 * len(cons.packing))]
        thinned = SpherePacking(cons.packing.points[np.sort(keep)],
                                cons.packing.center, cons.packing.radius,
                                cons.packing.delta, cons.packing.seed)
        cfg = DudleyConfig(epsilon=cons.epsilon, mode=cons.mode, seed=cons.seed,
                           projection_tol=cons.projection_tol)
        broken = assemble_construction(body, thinned, cfg)
        audit = audit_proof(broken, 10_000, seed=1)
        assert len(audit.violations) > 0

    def test_tolerance_constant_exposed(self):
        assert AUDIT_TOL == 1e-7
