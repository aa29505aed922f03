"""Monte Carlo verification kernels for the expectation identities the
solver's guarantees rest on: the sphere-projection constant, the smoothed
gradient identity, descent alignment, one-step progress, and the scaled
gradient direction.  Every estimator returns an EstimateReport with a
4-sigma pass/fail verdict and is bit-reproducible under a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .geometry import BallDomain, sample_unit_sphere_batch
from .objectives import Objective, make_quadratic, run_objective_suite
from .oracle import signed_bernoulli_batch
from .solver import SolverConfig
from .transfer import TransferFunction, make_transfer

SIGMA_DEFAULT = 4.0
# Rows per sampling chunk, scaled down for wide dimensions to bound memory.
_CHUNK_BUDGET = 8_000_000


def _chunk_rows(d: int) -> int:
    return min(100_000, max(1_000, _CHUNK_BUDGET // max(d, 1)))


@dataclass(frozen=True)
class EstimateReport:
    name: str
    estimate: Union[float, np.ndarray]
    std_error: float
    n_samples: int
    target: Union[float, np.ndarray, None]
    verdict: bool
    sigma: float = SIGMA_DEFAULT
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def plain(v):
            if isinstance(v, np.ndarray):
                return [float(x) for x in v]
            if isinstance(v, (np.floating, np.integer)):
                return float(v)
            return v

        out = {
            "name": self.name,
            "estimate": plain(self.estimate),
            "std_error": self.std_error,
            "n": self.n_samples,
            "target": plain(self.target),
            "verdict": bool(self.verdict),
        }
        if self.details:
            out["details"] = {k: plain(v) for k, v in self.details.items()}
        return out

    def __str__(self):
        status = "pass" if self.verdict else "FAIL"
        if isinstance(self.estimate, np.ndarray):
            est = "[" + ", ".join(f"{x:.6g}" for x in self.estimate) + "]"
        else:
            est = f"{self.estimate:.6g}"
        return f"{self.name}: {status} estimate={est} se={self.std_error:.2e} n={self.n_samples}"


def _mean_se(chunk_sums, chunk_sqsums, n):
    """Combine per-chunk sums; fsum keeps the reduction order-independent."""
    s = math.fsum(chunk_sums)
    sq = math.fsum(chunk_sqsums)
    mean = s / n
    var = max(sq / n - mean * mean, 0.0) * (n / max(n - 1, 1))
    return mean, math.sqrt(var / n)


def estimate_ctilde(d: int, n: int, rng: np.random.Generator) -> EstimateReport:
    """Estimate the sphere-projection constant: sqrt(d) * E|u_1|.

    The constant is dimension-uniform in [1/20, 1]; the verdict checks the
    confidence interval against that interval (tolerance 3 standard errors).
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if n < 10_000:
        raise ValueError(f"need n >= 10^4 for a meaningful interval, got {n}")
    chunk = _chunk_rows(d)
    sums, sqsums = [], []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        u1 = np.abs(sample_unit_sphere_batch(m, d, rng)[:, 0])
        sums.append(float(u1.sum()))
        sqsums.append(float((u1 * u1).sum()))
        done += m
    mean, se_mean = _mean_se(sums, sqsums, n)
    root_d = math.sqrt(d)
    chat = root_d * mean
    se = root_d * se_mean
    tol = 3.0 * se
    lo, hi = 1.0 / 20.0 - tol, 1.0 + tol
    verdict = (chat - 3.0 * se >= lo) and (chat + 3.0 * se <= hi)
    closed = {1: 1.0, 2: math.sqrt(2.0) * 2.0 / math.pi, 3: math.sqrt(3.0) / 2.0}
    return EstimateReport(
        name=f"ctilde[d={d}]",
        estimate=chat,
        std_error=se,
        n_samples=n,
        target=closed.get(d),
        verdict=verdict,
        details={"interval_lo": 1.0 / 20.0, "interval_hi": 1.0},
    )


def check_fkm_identity(a, n: int, rng: np.random.Generator) -> EstimateReport:
    """Monte Carlo check of E[(a.u) u] = a/d for uniform sphere directions."""
    a = np.asarray(a, dtype=float)
    d = a.size
    chunk = _chunk_rows(d)
    vec_sums, vec_sqsums = [], []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        U = sample_unit_sphere_batch(m, d, rng)
        X = (U @ a)[:, None] * U
        vec_sums.append(X.sum(axis=0))
        vec_sqsums.append((X * X).sum(axis=0))
        done += m
    est = np.empty(d)
    se = np.empty(d)
    for i in range(d):
        est[i], se[i] = _mean_se([s[i] for s in vec_sums],
                                 [q[i] for q in vec_sqsums], n)
    target = a / d
    dev = np.abs(est - target)
    verdict = bool(np.all(dev <= SIGMA_DEFAULT * se + 1e-15))
    return EstimateReport(
        name=f"fkm[d={d}]",
        estimate=est,
        std_error=float(se.max()),
        n_samples=n,
        target=target,
        verdict=verdict,
        details={"max_coord_error": float(dev.max())},
    )


def _duel_samples(w, objective: Objective, transfer: TransferFunction,
                  gamma: float, m: int, rng: np.random.Generator):
    """One chunk of fresh (u, o) duel outcomes at fixed w."""
    U = sample_unit_sphere_batch(m, objective.dim, rng)
    fplus = objective.values_at(w + gamma * U)
    fminus = objective.values_at(w - gamma * U)
    mu = transfer.eval(fplus - fminus)
    o = signed_bernoulli_batch(mu, rng)
    return U, o


def descent_alignment(w, objective: Objective, transfer: TransferFunction,
                      gamma: float, n: int, rng: np.random.Generator) -> EstimateReport:
    """Estimate E[o * u.(w - w*)], the inner product driving descent.

    Positive alignment means the comparison feedback points the step toward
    the minimizer on average.  For the linear transfer the closed-form lower
    bound (2 gamma / d) c_rho (gap - beta gamma^2) is also enforced.
    """
    w = np.asarray(w, dtype=float)
    v = w - objective.minimizer
    gap = objective.gap(w)
    d = objective.dim
    chunk = _chunk_rows(d)
    sums, sqsums = [], []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        U, o = _duel_samples(w, objective, transfer, gamma, m, rng)
        X = o * (U @ v)
        sums.append(float(X.sum()))
        sqsums.append(float((X * X).sum()))
        done += m
    est, se = _mean_se(sums, sqsums, n)
    details = {"gap": gap}
    target = None
    if gap <= 0.0:
        # at the minimizer the estimate should vanish by symmetry
        verdict = abs(est) <= SIGMA_DEFAULT * se
    else:
        verdict = est > SIGMA_DEFAULT * se
        if transfer.kind == "linear":
            bound = (2.0 * gamma / d) * transfer.c_rho * (gap - objective.beta * gamma * gamma)
            target = bound
            details["lower_bound"] = bound
            verdict = verdict and (est >= bound - SIGMA_DEFAULT * se)
    return EstimateReport(
        name=f"descent_alignment[{transfer.kind}]",
        estimate=est,
        std_error=se,
        n_samples=n,
        target=target,
        verdict=verdict,
        details=details,
    )


def roundwise_progress_check(w, cfg: SolverConfig, objective: Objective,
                             transfer: TransferFunction, n: int,
                             rng: np.random.Generator) -> EstimateReport:
    """One-step simulation: does E||w' - w*||^2 drop below ||w - w*||^2?

    For the linear transfer the predicted decrement
    2 eta (2 gamma / d) c_rho (gap - beta gamma^2) - eta^2 must be realized
    up to 4 standard errors.
    """
    w = np.asarray(w, dtype=float)
    wstar = objective.minimizer
    domain = objective.domain
    dist_sq0 = float((w - wstar) @ (w - wstar))
    gap = objective.gap(w)
    d = objective.dim
    chunk = _chunk_rows(d)
    sums, sqsums = [], []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        U, o = _duel_samples(w, objective, transfer, cfg.gamma, m, rng)
        W_next = w - (cfg.eta * o)[:, None] * U
        dc = W_next - domain.center
        nsq = np.einsum("ij,ij->i", dc, dc)
        outside = nsq > domain.radius * domain.radius
        if np.any(outside):
            scale = domain.radius / np.sqrt(nsq[outside])
            W_next[outside] = domain.center + scale[:, None] * dc[outside]
        dw = W_next - wstar
        X = np.einsum("ij,ij->i", dw, dw)
        sums.append(float(X.sum()))
        sqsums.append(float((X * X).sum()))
        done += m
    est, se = _mean_se(sums, sqsums, n)
    verdict = est <= dist_sq0 + SIGMA_DEFAULT * se
    target = None
    details = {"dist_sq_before": dist_sq0, "gap": gap}
    if transfer.kind == "linear":
        decrement = (2.0 * cfg.eta * (2.0 * cfg.gamma / d) * transfer.c_rho
                     * (gap - objective.beta * cfg.gamma * cfg.gamma)
                     - cfg.eta * cfg.eta)
        target = dist_sq0 - decrement
        details["predicted_decrement"] = decrement
        verdict = verdict and (est <= dist_sq0 - decrement + SIGMA_DEFAULT * se)
    return EstimateReport(
        name=f"roundwise_progress[{transfer.kind}]",
        estimate=est,
        std_error=se,
        n_samples=n,
        target=target,
        verdict=verdict,
        details=details,
    )


def scaled_gradient_estimate(w, objective: Objective, transfer: TransferFunction,
                             gamma: float, n: int, rng: np.random.Generator) -> EstimateReport:
    """Estimate the vector E[o u] and compare its direction with grad f(w).

    The verdict requires the component along the gradient to be positive at
    4 sigma; the magnitude ratio ||E[o u]|| / ||grad f||^p is reported for
    inspection only (no closed-form constant exists to assert against).
    """
    w = np.asarray(w, dtype=float)
    g = objective.gradient(w)
    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0:
        raise ValueError("scaled gradient direction is undefined at a zero-gradient point")
    ghat = g / gnorm
    d = objective.dim
    chunk = _chunk_rows(d)
    vec_sums = []
    along_sums, along_sqsums = [], []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        U, o = _duel_samples(w, objective, transfer, gamma, m, rng)
        OU = o[:, None] * U
        vec_sums.append(OU.sum(axis=0))
        along = OU @ ghat
        along_sums.append(float(along.sum()))
        along_sqsums.append(float((along * along).sum()))
        done += m
    vhat = np.array([math.fsum(s[i] for s in vec_sums) for i in range(d)]) / n
    along_mean, along_se = _mean_se(along_sums, along_sqsums, n)
    vnorm = float(np.linalg.norm(vhat))
    cosine = float(vhat @ ghat / vnorm) if vnorm > 0 else 0.0
    p = transfer.proxy.p if transfer.proxy is not None else 1
    return EstimateReport(
        name=f"scaled_gradient[{transfer.kind}]",
        estimate=vhat,
        std_error=along_se,
        n_samples=n,
        target=None,
        verdict=along_mean > SIGMA_DEFAULT * along_se,
        details={
            "cosine": cosine,
            "magnitude_ratio": vnorm / gnorm ** p,
            "grad_norm": gnorm,
            "along_gradient": along_mean,
        },
    )


# ---------------------------------------------------------------------------
# canned suites for the command-line diagnose entry point

CTILDE_DIMS = (1, 2, 3, 5, 10, 50, 200)
FKM_DIMS = (2, 3, 10)
FKM_VECTORS_PER_DIM = 20

SUITE_NAMES = ("ctilde", "fkm", "alignment", "progress", "scaled-gradient", "objectives")


def _alignment_problem():
    """Unit quadratic on the unit ball with the start on the boundary."""
    domain = BallDomain(np.zeros(2), 1.0)
    obj = make_quadratic(np.eye(2), np.zeros(2), domain, name="identity_d2")
    w = np.array([1.0, 0.0])
    return obj, w


def _progress_problem():
    """Same quadratic on a radius-2 ball so one step cannot leave the domain."""
    domain = BallDomain(np.zeros(2), 2.0)
    obj = make_quadratic(np.eye(2), np.zeros(2), domain, name="identity_d2_r2")
    w = np.array([1.0, 0.0])
    return obj, w


def _suite_ctilde(n, rng):
    return [estimate_ctilde(d, n, rng) for d in CTILDE_DIMS]


def _suite_fkm(n, rng):
    reports = []
    for d in FKM_DIMS:
        for _ in range(FKM_VECTORS_PER_DIM):
            a = sample_unit_sphere_batch(1, d, rng)[0]
            reports.append(check_fkm_identity(a, n, rng))
    return reports


def _suite_alignment(n, rng):
    obj, w = _alignment_problem()
    return [
        descent_alignment(w, obj, make_transfer("linear"), 0.1, n, rng),
        descent_alignment(w, obj, make_transfer("sign"), 1e-4, n, rng),
    ]


def _suite_progress(n, rng):
    obj, w = _progress_problem()
    eps = 0.4
    gamma = math.sqrt(eps / (2.0 * obj.beta))
    eta = eps ** 1.5 / (obj.dim * math.sqrt(2.0 * obj.beta))
    reports = [
        roundwise_progress_check(w, SolverConfig(eta=eta, gamma=gamma, budget=1, w1=w),
                                 obj, make_transfer("linear"), n, rng),
        roundwise_progress_check(w, SolverConfig(eta=0.01, gamma=0.01, budget=1, w1=w),
                                 obj, make_transfer("sign"), n, rng),
    ]
    return reports


def _suite_scaled_gradient(n, rng):
    obj, w = _alignment_problem()
    return [
        scaled_gradient_estimate(w, obj, make_transfer("sign"), 1e-4, n, rng),
        scaled_gradient_estimate(w, obj, make_transfer("linear"), 0.1, n, rng),
    ]


def _suite_objectives(n, rng):
    return run_objective_suite(trials=min(n, 100_000), rng=rng)


def run_suite(name: str, n: int, rng: np.random.Generator) -> list:
    """Run one named suite; 'all' concatenates every suite in order."""
    table = {
        "ctilde": _suite_ctilde,
        "fkm": _suite_fkm,
        "alignment": _suite_alignment,
        "progress": _suite_progress,
        "scaled-gradient": _suite_scaled_gradient,
        "objectives": _suite_objectives,
    }
    if name == "all":
        out = []
        for key in SUITE_NAMES:
            out.extend(table[key](n, rng))
        return out
    if name not in table:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES + ('all',)}")
    return table[name](n, rng)
