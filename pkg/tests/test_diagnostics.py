import math

import numpy as np
import pytest

from duelgrad.diagnostics import (
    SUITE_NAMES,
    check_fkm_identity,
    descent_alignment,
    estimate_ctilde,
    roundwise_progress_check,
    run_suite,
    scaled_gradient_estimate,
)
from duelgrad.geometry import BallDomain
from duelgrad.objectives import make_quadratic
from duelgrad.solver import SolverConfig
from duelgrad.transfer import make_transfer


def rng_for(seed):
    return np.random.default_rng(seed)


def unit_problem(radius=1.0):
    domain = BallDomain(np.zeros(2), radius)
    return make_quadratic(np.eye(2), np.zeros(2), domain)


class TestEstimateCtilde:
    def test_dimension_one_is_exact(self):
        # |u_1| = 1 for every draw on the 0-sphere
        report = estimate_ctilde(1, 10_000, rng_for(0))
        assert report.estimate == 1.0
        assert report.std_error == 0.0
        assert report.verdict

    def test_dimension_two_matches_closed_form(self):
        report = estimate_ctilde(2, 100_000, rng_for(1))
        closed = math.sqrt(2.0) * 2.0 / math.pi
        assert report.target == closed
        assert report.estimate == pytest.approx(closed, abs=5 * report.std_error)
        assert abs(report.estimate - closed) < 0.01
        assert report.verdict

    def test_dimension_three_matches_closed_form(self):
        report = estimate_ctilde(3, 100_000, rng_for(2))
        assert report.target == math.sqrt(3.0) / 2.0
        assert report.estimate == pytest.approx(report.target, abs=0.01)

    def test_no_closed_form_above_dimension_three(self):
        report = estimate_ctilde(5, 10_000, rng_for(3))
        assert report.target is None
        assert 0.05 <= report.estimate <= 1.0

    def test_sample_floor_is_enforced(self):
        with pytest.raises(ValueError, match="10\\^4"):
            estimate_ctilde(2, 9_999, rng_for(0))
        with pytest.raises(ValueError):
            estimate_ctilde(0, 10_000, rng_for(0))


class TestFkmIdentity:
    def test_mean_projection_recovers_a_over_d(self):
        a = np.array([1.0, 0.0])
        report = check_fkm_identity(a, 100_000, rng_for(4))
        assert np.array_equal(report.target, a / 2.0)
        assert report.verdict
        assert np.allclose(report.estimate, a / 2.0, atol=5e-3)

    def test_higher_dimension(self):
        a = np.array([0.3, -1.2, 0.5, 0.0, 2.0])
        report = check_fkm_identity(a, 200_000, rng_for(5))
        assert report.verdict
        assert report.details["max_coord_error"] < 0.01

    def test_deterministic_at_fixed_seed(self):
        a = np.array([0.5, 0.5, -1.0])
        r1 = check_fkm_identity(a, 50_000, rng_for(6))
        r2 = check_fkm_identity(a, 50_000, rng_for(6))
        assert np.array_equal(r1.estimate, r2.estimate)
        assert r1.std_error == r2.std_error


class TestDescentAlignment:
    def test_linear_transfer_meets_its_lower_bound(self):
        obj = unit_problem()
        report = descent_alignment(np.array([1.0, 0.0]), obj,
                                   make_transfer("linear"), 0.1, 200_000, rng_for(7))
        # gap 0.5, beta 1, gamma 0.1: bound = (2*0.1/2)*(0.5 - 0.01)
        assert report.target == pytest.approx(0.049, rel=1e-12)
        assert report.verdict
        assert report.estimate >= report.target - 4.0 * report.std_error

    def test_sign_transfer_is_positively_aligned(self):
        obj = unit_problem()
        report = descent_alignment(np.array([1.0, 0.0]), obj,
                                   make_transfer("sign"), 1e-4, 100_000, rng_for(8))
        assert report.verdict
        assert report.estimate > 0.5  # E|u.v| = ctilde(2)/sqrt(2) ~ 0.6366

    def test_alignment_vanishes_at_the_minimizer(self):
        obj = unit_problem()
        report = descent_alignment(np.zeros(2), obj, make_transfer("linear"),
                                   0.1, 100_000, rng_for(9))
        assert report.details["gap"] == 0.0
        assert report.verdict
        assert abs(report.estimate) <= 4.0 * report.std_error


class TestRoundwiseProgress:
    def test_zero_step_size_is_exactly_neutral(self):
        obj = unit_problem(radius=2.0)
        w = np.array([1.0, 0.0])
        cfg = SolverConfig(eta=0.0, gamma=0.1, budget=1, w1=w)
        report = roundwise_progress_check(w, cfg, obj, make_transfer("linear"),
                                          20_000, rng_for(10))
        assert report.estimate == report.details["dist_sq_before"] == 1.0
        assert report.std_error == 0.0
        assert report.verdict

    def test_linear_transfer_realizes_predicted_decrement(self):
        obj = unit_problem(radius=2.0)
        w = np.array([1.0, 0.0])
        eps = 0.4
        gamma = math.sqrt(eps / 2.0)
        eta = eps ** 1.5 / (2.0 * math.sqrt(2.0))
        cfg = SolverConfig(eta=eta, gamma=gamma, budget=1, w1=w)
        report = roundwise_progress_check(w, cfg, obj, make_transfer("linear"),
                                          200_000, rng_for(11))
        assert report.verdict
        decrement = report.details["predicted_decrement"]
        assert decrement == pytest.approx(
            2.0 * eta * gamma * (0.5 - gamma * gamma) - eta * eta, rel=1e-12)
        assert report.estimate <= 1.0 - decrement + 4.0 * report.std_error

    def test_sign_transfer_makes_progress(self):
        obj = unit_problem(radius=2.0)
        w = np.array([1.0, 0.0])
        cfg = SolverConfig(eta=0.01, gamma=0.01, budget=1, w1=w)
        report = roundwise_progress_check(w, cfg, obj, make_transfer("sign"),
                                          100_000, rng_for(12))
        assert report.verdict
        assert report.estimate < 1.0


class TestScaledGradientEstimate:
    def test_zero_gradient_point_is_rejected(self):
        obj = unit_problem()
        with pytest.raises(ValueError, match="zero-gradient"):
            scaled_gradient_estimate(np.zeros(2), obj, make_transfer("sign"),
                                     1e-4, 10_000, rng_for(0))

    def test_sign_feedback_recovers_the_gradient_direction(self):
        obj = unit_problem()
        report = scaled_gradient_estimate(np.array([1.0, 0.0]), obj,
                                          make_transfer("sign"), 1e-4,
                                          100_000, rng_for(13))
        assert report.verdict
        assert report.details["cosine"] >= 0.99
        assert report.details["along_gradient"] == pytest.approx(2.0 / math.pi,
                                                                 abs=0.01)

    def test_linear_feedback_keeps_the_direction(self):
        obj = unit_problem()
        report = scaled_gradient_estimate(np.array([0.5, 0.5]), obj,
                                          make_transfer("linear"), 0.1,
                                          100_000, rng_for(14))
        assert report.verdict
        assert report.details["cosine"] >= 0.98
        assert report.details["magnitude_ratio"] > 0.0


class TestReports:
    def test_json_dict_has_the_contract_keys(self):
        report = estimate_ctilde(2, 10_000, rng_for(0))
        payload = report.to_json_dict()
        assert set(payload) >= {"name", "estimate", "std_error", "n", "target", "verdict"}
        assert isinstance(payload["verdict"], bool)
        assert payload["n"] == 10_000

    def test_json_dict_flattens_arrays(self):
        report = check_fkm_identity(np.array([1.0, 0.0]), 10_000, rng_for(0))
        payload = report.to_json_dict()
        assert isinstance(payload["estimate"], list)
        assert payload["target"] == [0.5, 0.0]

    def test_str_shows_verdict(self):
        report = estimate_ctilde(2, 10_000, rng_for(0))
        assert "pass" in str(report)


class TestSuites:
    def test_full_suite_passes_at_default_seed(self):
        reports = run_suite("all", 10_000, rng_for(0))
        names = [r.name if hasattr(r, "name") else r for r in reports]
        assert len(reports) == 101, names
        failed = [str(r) for r in reports
                  if not (r.verdict if hasattr(r, "verdict") else r.passed)]
        assert not failed, failed

    def test_single_suite_runs_alone(self):
        reports = run_suite("alignment", 10_000, rng_for(1))
        assert len(reports) == 2
        assert all(r.verdict for r in reports)

    def test_suite_is_deterministic(self):
        a = [r.to_json_dict() for r in run_suite("alignment", 20_000, rng_for(2))]
        b = [r.to_json_dict() for r in run_suite("alignment", 20_000, rng_for(2))]
        assert a == b

    def test_unknown_suite_is_rejected(self):
        with pytest.raises(ValueError, match="suite"):
            run_suite("nonsense", 10_000, rng_for(0))

    def test_suite_registry_is_complete(self):
        assert SUITE_NAMES == ("ctilde", "fkm", "alignment", "progress",
                               "scaled-gradient", "objectives")
