import dataclasses

import numpy as np
import pytest

from duelgrad.geometry import BallDomain
from duelgrad.objectives import (
    Objective,
    builtin_quadratics,
    check_first_order_optimality,
    check_gradient_consistency,
    check_smooth_convex,
    check_strong_consequences,
    check_strong_smooth_coercivity,
    make_quadratic,
    run_objective_suite,
)


def rng_for(seed):
    return np.random.default_rng(seed)


def quad(A, wstar=(0.0, 0.0), radius=1.0, **kw):
    A = np.asarray(A, dtype=float)
    return make_quadratic(A, wstar, BallDomain(np.zeros(A.shape[0]), radius), **kw)


class TestMakeQuadratic:
    def test_identity_constants(self):
        obj = quad(np.eye(2))
        assert obj.beta == 1.0 and obj.alpha == 1.0
        assert obj.value(np.array([0.6, 0.8])) == pytest.approx(0.5)
        assert np.allclose(obj.gradient(np.array([0.6, 0.8])), [0.6, 0.8])

    def test_rank_deficient_has_zero_alpha(self):
        obj = quad(np.diag([1.0, 0.0]))
        assert obj.beta == 1.0 and obj.alpha == 0.0
        # flat direction: moving along e2 never changes the value
        assert obj.value(np.array([0.0, 0.9])) == 0.0

    def test_anisotropic_constants_and_shifted_minimizer(self):
        obj = quad(np.diag([4.0, 1.0]), wstar=(0.1, -0.2))
        assert obj.beta == 4.0 and obj.alpha == 1.0
        assert obj.value(np.asarray(obj.minimizer)) == 0.0
        w = np.array([0.1, 0.8])
        assert obj.value(w) == pytest.approx(0.5 * 1.0 * 1.0**2)

    def test_lipschitz_covers_perturbation_collar(self):
        obj = quad(np.diag([4.0, 1.0]), gamma_max=0.5)
        assert obj.lipschitz == pytest.approx(4.0 * (2.0 + 0.5))

    def test_vectorized_value_matches_loop(self):
        obj = quad(np.diag([4.0, 1.0]), wstar=(0.1, -0.2))
        W = obj.domain.sample_points(500, rng_for(0))
        loop = np.array([obj.value(w) for w in W])
        assert np.allclose(obj.values_at(W), loop, rtol=1e-12, atol=0)
        gloop = np.array([obj.gradient(w) for w in W])
        assert np.allclose(obj.gradients_at(W), gloop, rtol=1e-12, atol=0)

    def test_gap_is_zero_at_the_minimizer(self):
        obj = quad(np.eye(2), wstar=(0.2, 0.3))
        assert obj.gap(np.asarray(obj.minimizer)) == 0.0
        assert obj.gap(np.array([0.5, 0.5])) > 0.0

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            quad(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError, match="PSD"):
            quad(np.diag([1.0, -0.5]))

    def test_rejects_minimizer_outside_domain(self):
        with pytest.raises(ValueError, match="domain"):
            quad(np.eye(2), wstar=(2.0, 0.0))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            make_quadratic(np.eye(3), [0.0, 0.0], BallDomain(np.zeros(2), 1.0))
        with pytest.raises(ValueError):
            make_quadratic(np.eye(2), [0.0, 0.0], BallDomain(np.zeros(3), 1.0))

    def test_objective_validates_constants(self):
        obj = quad(np.eye(2))
        with pytest.raises(ValueError):
            dataclasses.replace(obj, beta=0.5, alpha=1.0)
        with pytest.raises(ValueError):
            dataclasses.replace(obj, beta=0.0, alpha=0.0)


class TestPropertyChecks:
    def test_builtin_family_passes_suite(self):
        reports = run_objective_suite(trials=10_000, rng=rng_for(0))
        failed = [str(r) for r in reports if not r.passed]
        assert not failed, failed
        assert all(r.max_violation <= 1e-9 for r in reports
                   if r.name != "gradient_consistency")

    def test_overstated_smoothness_is_caught(self):
        obj = quad(np.diag([4.0, 1.0]))
        lying = dataclasses.replace(obj, beta=1.0)
        report = check_smooth_convex(lying, 5_000, rng_for(1))
        assert not report.passed
        assert report.max_violation > 1e-3

    def test_overstated_strong_convexity_is_caught(self):
        obj = quad(np.diag([4.0, 1.0]))
        lying = dataclasses.replace(obj, alpha=2.0)
        bad = [check_strong_smooth_coercivity(lying, 5_000, rng_for(2)),
               check_strong_consequences(lying, 5_000, rng_for(2))]
        assert any(not r.passed for r in bad)

    def test_coercivity_requires_strong_convexity(self):
        flat = quad(np.diag([1.0, 0.0]))
        with pytest.raises(ValueError):
            check_strong_smooth_coercivity(flat, 100, rng_for(0))
        with pytest.raises(ValueError):
            check_strong_consequences(flat, 100, rng_for(0))

    def test_interior_minimizer_has_zero_gradient(self):
        report = check_first_order_optimality(quad(np.eye(2), wstar=(0.1, 0.2)))
        assert report.passed and report.max_violation <= 1e-9

    def test_boundary_minimizer_is_skipped(self):
        # variational inequality, not stationarity, holds on the boundary
        report = check_first_order_optimality(quad(np.diag([1.0, 0.5]), wstar=(-1.0, 0.0)))
        assert report.passed

    def test_gradient_consistency(self):
        obj = quad(np.diag([4.0, 1.0]), wstar=(0.1, -0.2))
        report = check_gradient_consistency(obj, 25, rng_for(3))
        assert report.passed

    def test_report_str_shows_status(self):
        report = check_first_order_optimality(quad(np.eye(2)))
        assert "pass" in str(report) and "identity" not in str(report)


def test_builtin_family_shapes():
    objs = builtin_quadratics()
    assert len(objs) == 5
    names = {o.name for o in objs}
    assert len(names) == 5
    dims = sorted(o.dim for o in objs)
    assert dims == [2, 2, 2, 2, 3]
    # every minimizer is feasible for its own domain
    assert all(o.domain.contains(np.asarray(o.minimizer), tol=1e-12) for o in objs)
