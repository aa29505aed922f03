"""Test objectives with certified constants and Appendix-style property checks.

The built-in family is quadratics f(w) = 1/2 (w - w*)^T A (w - w*): their
smoothness beta, strong convexity alpha, and minimizer are exact, which is
what the tuning formulas need.  The gradient exists for diagnostics only;
the solvers never touch it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import BallDomain

CHECK_SLACK = 1e-9


@dataclass
class Objective:
    dim: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    beta: float
    alpha: float
    minimizer: np.ndarray
    lipschitz: float
    domain: BallDomain
    name: str = "objective"
    # vectorized paths for Monte Carlo diagnostics; (n, d) -> (n,) / (n, d)
    value_many: Optional[Callable[[np.ndarray], np.ndarray]] = None
    gradient_many: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.beta < self.alpha or self.alpha < 0 or self.beta <= 0:
            raise ValueError(
                f"need beta >= alpha >= 0 and beta > 0, got beta={self.beta}, alpha={self.alpha}"
            )

    def values_at(self, W: np.ndarray) -> np.ndarray:
        if self.value_many is not None:
            return self.value_many(W)
        return np.array([self.value(w) for w in W])

    def gradients_at(self, W: np.ndarray) -> np.ndarray:
        if self.gradient_many is not None:
            return self.gradient_many(W)
        return np.array([self.gradient(w) for w in W])

    def gap(self, w: np.ndarray) -> float:
        return self.value(w) - self.value(self.minimizer)


def make_quadratic(A: np.ndarray, wstar, domain: BallDomain,
                   gamma_max: float = 0.0, name: str = "quadratic") -> Objective:
    """f(w) = 1/2 (w - w*)^T A (w - w*) for symmetric PSD A.

    beta/alpha are the extreme eigenvalues of A.  The Lipschitz bound covers
    the domain plus a gamma_max collar for perturbed queries:
    L = beta * (D + gamma_max).
    """
    A = np.asarray(A, dtype=float)
    wstar = np.asarray(wstar, dtype=float)
    d = wstar.size
    if A.shape != (d, d):
        raise ValueError(f"A must be ({d},{d}) to match wstar, got {A.shape}")
    if not np.allclose(A, A.T, atol=1e-12):
        raise ValueError("A must be symmetric")
    eigs = np.linalg.eigvalsh(A)
    if eigs[0] < -1e-10:
        raise ValueError(f"A must be PSD; smallest eigenvalue {eigs[0]}")
    if domain.dim != d:
        raise ValueError(f"domain dimension {domain.dim} != objective dimension {d}")
    if not domain.contains(wstar, tol=1e-12):
        raise ValueError("minimizer must lie in the domain")

    alpha = float(max(eigs[0], 0.0))
    beta = float(eigs[-1])

    def value(w, _A=A, _ws=wstar):
        dw = w - _ws
        return 0.5 * float(dw @ (_A @ dw))

    def gradient(w, _A=A, _ws=wstar):
        return _A @ (w - _ws)

    def value_many(W, _A=A, _ws=wstar):
        DW = W - _ws
        return 0.5 * np.einsum("ij,ij->i", DW @ _A, DW)

    def gradient_many(W, _A=A, _ws=wstar):
        return (W - _ws) @ _A

    return Objective(
        dim=d,
        value=value,
        gradient=gradient,
        beta=beta,
        alpha=alpha,
        minimizer=wstar,
        lipschitz=beta * (domain.diameter + gamma_max),
        domain=domain,
        name=name,
        value_many=value_many,
        gradient_many=gradient_many,
    )


def builtin_quadratics() -> list[Objective]:
    """The fixed objective family the property suite and CLI diagnostics run on."""
    objs = [
        make_quadratic(np.eye(2), [0.0, 0.0], BallDomain([0.0, 0.0], 1.0),
                       name="identity_d2"),
        make_quadratic(np.diag([4.0, 1.0]), [0.1, -0.2], BallDomain([0.0, 0.0], 1.0),
                       name="aniso_d2"),
        make_quadratic(np.diag([1.0, 0.0]), [0.0, 0.0], BallDomain([0.0, 0.0], 1.0),
                       name="rank_deficient_d2"),
        make_quadratic(np.diag([1.0, 0.5]), [-1.0, 0.0], BallDomain([0.0, 0.0], 1.0),
                       name="strong_d2"),
    ]
    # a non-axis-aligned case: Householder conjugation keeps eigenvalues exact
    v = np.array([1.0, 2.0, 3.0])
    H = np.eye(3) - 2.0 * np.outer(v, v) / (v @ v)
    A = H @ np.diag([3.0, 1.0, 0.5]) @ H
    A = 0.5 * (A + A.T)
    objs.append(make_quadratic(A, [0.1, 0.2, -0.1], BallDomain([0.0, 0.0, 0.0], 1.5),
                               name="rotated_d3"))
    return objs


@dataclass(frozen=True)
class PropertyReport:
    name: str
    objective: str
    passed: bool
    max_violation: float
    n_pairs: int

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (f"{self.name}[{self.objective}]: {status} "
                f"(max violation {self.max_violation:.3e}, n={self.n_pairs})")


def _pair_samples(obj: Objective, trials: int, rng: np.random.Generator):
    X = obj.domain.sample_points(trials, rng)
    Y = obj.domain.sample_points(trials, rng)
    return X, Y


def check_smooth_convex(obj: Objective, trials: int, rng: np.random.Generator) -> PropertyReport:
    """Convexity and the beta-smooth upper bound on random domain pairs.

    f(x) - f(y) must sit between grad f(y)^T (x-y) and the same plus
    (beta/2)||x-y||^2; when alpha > 0 the lower bound tightens by
    (alpha/2)||x-y||^2.
    """
    X, Y = _pair_samples(obj, trials, rng)
    fX, fY = obj.values_at(X), obj.values_at(Y)
    gY = obj.gradients_at(Y)
    diff = X - Y
    lin = np.einsum("ij,ij->i", gY, diff)
    sq = np.einsum("ij,ij->i", diff, diff)

    viol_cvx = lin - (fX - fY)
    viol_smooth = (fX - fY) - (lin + 0.5 * obj.beta * sq)
    worst = max(float(viol_cvx.max()), float(viol_smooth.max()))
    if obj.alpha > 0:
        viol_strong = (lin + 0.5 * obj.alpha * sq) - (fX - fY)
        worst = max(worst, float(viol_strong.max()))
    return PropertyReport("smooth_convex", obj.name, worst <= CHECK_SLACK, worst, trials)


def check_strong_smooth_coercivity(obj: Objective, trials: int,
                                   rng: np.random.Generator) -> PropertyReport:
    """Coercivity of strongly convex smooth f:

    (grad f(x) - grad f(y))^T (x-y)
        >= alpha*beta/(alpha+beta) ||x-y||^2 + 1/(alpha+beta) ||grad diff||^2.
    """
    if obj.alpha <= 0:
        raise ValueError(f"{obj.name}: coercivity check needs alpha > 0")
    X, Y = _pair_samples(obj, trials, rng)
    gdiff = obj.gradients_at(X) - obj.gradients_at(Y)
    diff = X - Y
    lhs = np.einsum("ij,ij->i", gdiff, diff)
    ab = obj.alpha + obj.beta
    rhs = (obj.alpha * obj.beta / ab) * np.einsum("ij,ij->i", diff, diff) \
        + (1.0 / ab) * np.einsum("ij,ij->i", gdiff, gdiff)
    worst = float((rhs - lhs).max())
    return PropertyReport("coercivity", obj.name, worst <= CHECK_SLACK, worst, trials)


def check_smooth_consequences(obj: Objective, trials: int,
                              rng: np.random.Generator) -> PropertyReport:
    """||grad f(x)||^2 <= 2 beta gap(x) and gap(x) <= (beta/2) ||x - x*||^2."""
    X = obj.domain.sample_points(trials, rng)
    fstar = obj.value(obj.minimizer)
    gaps = obj.values_at(X) - fstar
    g = obj.gradients_at(X)
    gnorm_sq = np.einsum("ij,ij->i", g, g)
    dist_sq = np.einsum("ij,ij->i", X - obj.minimizer, X - obj.minimizer)
    worst = max(float((gnorm_sq - 2.0 * obj.beta * gaps).max()),
                float((gaps - 0.5 * obj.beta * dist_sq).max()),
                float((-gaps).max()))  # minimizer is a lower bound on samples
    return PropertyReport("smooth_consequences", obj.name, worst <= CHECK_SLACK, worst, trials)


def check_strong_consequences(obj: Objective, trials: int,
                              rng: np.random.Generator) -> PropertyReport:
    """(alpha/2)||x - x*||^2 <= gap(x) and ||grad f(x)|| >= alpha ||x - x*||."""
    if obj.alpha <= 0:
        raise ValueError(f"{obj.name}: strong-convexity consequences need alpha > 0")
    X = obj.domain.sample_points(trials, rng)
    fstar = obj.value(obj.minimizer)
    gaps = obj.values_at(X) - fstar
    g = obj.gradients_at(X)
    gnorm = np.sqrt(np.einsum("ij,ij->i", g, g))
    dist = np.sqrt(np.einsum("ij,ij->i", X - obj.minimizer, X - obj.minimizer))
    worst = max(float((0.5 * obj.alpha * dist**2 - gaps).max()),
                float((obj.alpha * dist - gnorm).max()))
    return PropertyReport("strong_consequences", obj.name, worst <= CHECK_SLACK, worst, trials)


def check_first_order_optimality(obj: Objective) -> PropertyReport:
    """Interior minimizers must have a vanishing gradient."""
    dist_c = float(np.linalg.norm(obj.minimizer - obj.domain.center))
    interior = dist_c < obj.domain.radius - 1e-12
    gnorm = float(np.linalg.norm(obj.gradient(obj.minimizer)))
    # boundary minimizers only need the variational inequality; skip those
    passed = (gnorm <= CHECK_SLACK) if interior else True
    return PropertyReport("first_order_optimality", obj.name, passed, gnorm, 1)


def check_gradient_consistency(obj: Objective, trials: int,
                               rng: np.random.Generator,
                               rel_tol: float = 1e-5) -> PropertyReport:
    """Gradient against central finite differences at random domain points."""
    worst = 0.0
    for _ in range(trials):
        x = obj.domain.sample_point(rng)
        g = obj.gradient(x)
        fd = np.empty_like(g)
        for i in range(obj.dim):
            h = 1e-6 * max(1.0, abs(x[i]))
            e = np.zeros(obj.dim)
            e[i] = h
            fd[i] = (obj.value(x + e) - obj.value(x - e)) / (2.0 * h)
        scale = max(1.0, float(np.linalg.norm(g)))
        worst = max(worst, float(np.linalg.norm(fd - g)) / scale)
    return PropertyReport("gradient_consistency", obj.name, worst <= rel_tol, worst, trials)


def run_objective_suite(objectives=None, trials: int = 10_000,
                        rng: np.random.Generator | None = None) -> list[PropertyReport]:
    """All property checks over the built-in family (or a supplied one)."""
    if objectives is None:
        objectives = builtin_quadratics()
    if rng is None:
        rng = np.random.default_rng(0)
    reports = []
    for obj in objectives:
        reports.append(check_smooth_convex(obj, trials, rng))
        reports.append(check_smooth_consequences(obj, trials, rng))
        if obj.alpha > 0:
            reports.append(check_strong_smooth_coercivity(obj, trials, rng))
            reports.append(check_strong_consequences(obj, trials, rng))
        reports.append(check_first_order_optimality(obj))
        reports.append(check_gradient_consistency(obj, min(trials, 50), rng))
    return reports
