"""Projected relative-gradient descent from comparison feedback.

Two algorithms: a single-phase descent for smooth convex objectives, and an
epoch-restarted variant for strongly convex ones that contracts the distance
bound by sqrt(3/4) per epoch.  Neither ever evaluates the objective; progress
columns are instrumentation computed on the side from the known minimizer.

Tuning functions translate problem constants (eps, beta, alpha, d, D) and
transfer proxy constants (p, c_rho) into step size eta, perturbation gamma,
and query budget T, exactly as the convergence guarantees prescribe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import (BallDomain, sample_unit_sphere,
                       sample_unit_sphere_batch, shrink_onto_ball)
from .objectives import Objective
from .oracle import ComparisonOracle

# Lower end of the universal-constant interval for E|g.u| = ctilde ||g||/sqrt(d);
# conservative tuning uses it unless the caller overrides with a measured value.
CTILDE_DEFAULT = 1.0 / 20.0
# Sign-case budget constant; the guarantee only fixes the order T = O(d D beta / eps).
C_SIGN_DEFAULT = 400.0

_CHUNK = 4096


@dataclass(frozen=True)
class TunedParams:
    gamma: float
    eta: float
    budget: int


@dataclass(frozen=True)
class SolverConfig:
    eta: float
    gamma: float
    budget: int
    w1: np.ndarray

    def __post_init__(self):
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be finite and >= 0, got {self.eta}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and positive, got {self.gamma}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        object.__setattr__(self, "w1", np.asarray(self.w1, dtype=float))


@dataclass(frozen=True)
class EpochParams:
    D: float
    eta: float
    gamma: float
    budget: int
    budget_raw: float


@dataclass(frozen=True)
class EpochSchedule:
    k_eps: int
    epochs: tuple[EpochParams, ...]
    B: float
    ctilde: float
    p: int
    eps: float
    D: float

    @property
    def total_budget(self) -> int:
        return sum(ep.budget for ep in self.epochs)

    @property
    def trivial(self) -> bool:
        """True when every feasible point is already eps-optimal."""
        return self.k_eps == 0


@dataclass(frozen=True)
class EpochRow:
    k: int
    D: float
    eta: float
    gamma: float
    budget: int
    t_start: int
    dist_sq_start: float
    dist_sq_end: float


@dataclass
class RunRecord:
    """Strided trajectory plus summary; the recorded gap column always
    contains the overall minimum (the argmin row is merged in)."""

    t: np.ndarray
    queries: np.ndarray
    gap: np.ndarray
    dist_sq: np.ndarray
    min_gap: float
    argmin_t: int
    total_queries: int
    seed: Optional[int]
    final_w: np.ndarray
    epochs: list[EpochRow] = field(default_factory=list)

    @property
    def final_gap(self) -> float:
        return float(self.gap[-1])

    @property
    def final_dist_sq(self) -> float:
        return float(self.dist_sq[-1])


class _Recorder:
    """Observes every iterate; stores strided rows and the running minimum.

    Iterates arrive in blocks so the gap evaluations vectorize; per-step
    observation would dominate the solver loop otherwise.
    """

    def __init__(self, objective: Objective, stride: int):
        if stride < 1:
            raise ValueError(f"record stride must be >= 1, got {stride}")
        self.stride = stride
        self._values_at = objective.values_at
        self._value = objective.value
        self._fstar = objective.value(objective.minimizer)
        self._wstar = objective.minimizer
        self.ts: list[int] = []
        self.gaps: list[float] = []
        self.dists: list[float] = []
        self.min_gap = math.inf
        self.argmin = (0, math.inf, math.inf)

    def observe(self, t: int, w: np.ndarray, force: bool = False):
        gap = self._value(w) - self._fstar
        dw = w - self._wstar
        dist_sq = float(dw @ dw)
        if gap < self.min_gap:
            self.min_gap = gap
            self.argmin = (t, gap, dist_sq)
        if force or (t - 1) % self.stride == 0:
            self.ts.append(t)
            self.gaps.append(gap)
            self.dists.append(dist_sq)

    def observe_block(self, t_first: int, W: np.ndarray, force_last: bool = False):
        """Record iterates W[i] with indices t_first + i."""
        gaps = self._values_at(W) - self._fstar
        dW = W - self._wstar
        dists = np.einsum("ij,ij->i", dW, dW)
        i_min = int(np.argmin(gaps))  # first minimum wins, as in stepwise order
        if gaps[i_min] < self.min_gap:
            self.min_gap = float(gaps[i_min])
            self.argmin = (t_first + i_min, float(gaps[i_min]), float(dists[i_min]))
        m = W.shape[0]
        start = (self.stride - (t_first - 1) % self.stride) % self.stride
        idx = list(range(start, m, self.stride))
        if force_last and (m - 1) not in idx:
            idx.append(m - 1)
        for i in idx:
            self.ts.append(t_first + i)
            self.gaps.append(float(gaps[i]))
            self.dists.append(float(dists[i]))

    def finalize(self, total_queries: int, seed, final_w,
                 epochs: list[EpochRow] | None = None) -> RunRecord:
        ts, gaps, dists = self.ts, self.gaps, self.dists
        amin_t, amin_gap, amin_dist = self.argmin
        if amin_t not in ts:
            i = int(np.searchsorted(ts, amin_t))
            ts = ts[:i] + [amin_t] + ts[i:]
            gaps = gaps[:i] + [amin_gap] + gaps[i:]
            dists = dists[:i] + [amin_dist] + dists[i:]
        t_arr = np.asarray(ts, dtype=np.int64)
        return RunRecord(
            t=t_arr,
            queries=t_arr - 1,
            gap=np.asarray(gaps),
            dist_sq=np.asarray(dists),
            min_gap=self.min_gap,
            argmin_t=amin_t,
            total_queries=total_queries,
            seed=seed,
            final_w=final_w,
            epochs=epochs or [],
        )


def rgd_step(w: np.ndarray, cfg: SolverConfig, oracle: ComparisonOracle,
             domain: BallDomain, rng: np.random.Generator,
             direction_sampler: Optional[Callable] = None):
    """One descent round: duel (w + gamma*u, w - gamma*u), step against the
    winner, project.  Returns (w_next, o, u); consumes exactly one query.

    `rng` drives only the direction sample; the oracle flips its own coin.
    """
    sampler = direction_sampler or sample_unit_sphere
    u = sampler(domain.dim, rng)
    gu = cfg.gamma * u
    o = oracle.duel(w + gu, w - gu)
    w_next = domain.project(w - (cfg.eta * o) * u)
    return w_next, o, u


def _descend(w, eta, gamma, budget, oracle, domain, rng, recorder,
             t_offset, direction_sampler=None):
    """Run `budget` steps starting at global iterate index t_offset.

    Chunked direction sampling consumes the generator exactly like stepwise
    sampling, so the trajectory is bit-identical to composing rgd_step.
    """
    center = domain.center
    radius_sq = domain.radius * domain.radius
    radius = domain.radius
    duel = oracle.duel
    done = 0
    W_buf = np.empty((min(_CHUNK, budget), domain.dim))
    while done < budget:
        m = min(_CHUNK, budget - done)
        if direction_sampler is None:
            U = sample_unit_sphere_batch(m, domain.dim, rng)
        else:
            U = np.stack([direction_sampler(domain.dim, rng) for _ in range(m)])
        for i in range(m):
            u = U[i]
            gu = gamma * u
            o = duel(w + gu, w - gu)
            w = w - (eta * o) * u
            dc = w - center
            nsq = float(dc @ dc)
            if nsq > radius_sq:
                w = shrink_onto_ball(center, radius, radius_sq, dc, nsq)
            W_buf[i] = w
        # W_buf[i] is the iterate with index t_offset + done + i + 2 (w1 is t=1)
        recorder.observe_block(t_offset + done + 2, W_buf[:m],
                               force_last=done + m == budget)
        done += m
    return w


def _auto_stride(total_budget: int, record_stride: Optional[int]) -> int:
    # default keeps ~1000 rows however large the budget is
    if record_stride is not None:
        return record_stride
    return max(1, total_budget // 1000)


def rgd_run(cfg: SolverConfig, oracle: ComparisonOracle, objective: Objective,
            domain: BallDomain, rng: np.random.Generator,
            record_stride: Optional[int] = None, seed: Optional[int] = None,
            direction_sampler: Optional[Callable] = None) -> RunRecord:
    """Run the full budget from cfg.w1; returns the recorded trajectory.

    Rows are captured at t = 1, every `record_stride` iterates, t = T+1, and
    wherever the running-minimum gap was attained.
    """
    w = np.asarray(cfg.w1, dtype=float)
    if not domain.contains(w, tol=1e-9):
        raise ValueError("w1 must lie in the domain")
    before = oracle.query_count
    recorder = _Recorder(objective, _auto_stride(cfg.budget, record_stride))
    recorder.observe(1, w, force=True)
    w = _descend(w, cfg.eta, cfg.gamma, cfg.budget, oracle, domain, rng,
                 recorder, t_offset=0, direction_sampler=direction_sampler)
    consumed = oracle.query_count - before
    assert consumed == cfg.budget, f"query accounting broke: {consumed} != {cfg.budget}"
    return recorder.finalize(consumed, seed, w)


def epoch_rgd_run(schedule: EpochSchedule, w1, oracle: ComparisonOracle,
                  objective: Objective, domain: BallDomain,
                  rng: np.random.Generator, record_stride: Optional[int] = None,
                  seed: Optional[int] = None) -> RunRecord:
    """Chain warm-started descent phases per the schedule.

    Each epoch k runs t_k steps at (eta_k, gamma_k); per-epoch start/end
    squared distances are appended to the record.
    """
    if schedule.trivial or not schedule.epochs:
        raise ValueError("empty schedule: the problem is trivial at this eps")
    w = np.asarray(w1, dtype=float)
    if not domain.contains(w, tol=1e-9):
        raise ValueError("w1 must lie in the domain")
    dist0 = float(np.linalg.norm(w - objective.minimizer))
    if dist0 > schedule.D + 1e-9:
        raise ValueError(
            f"||w1 - w*|| = {dist0} exceeds the schedule's distance bound D = {schedule.D}"
        )
    total = schedule.total_budget
    before = oracle.query_count
    recorder = _Recorder(objective, _auto_stride(total, record_stride))
    recorder.observe(1, w, force=True)
    epoch_rows: list[EpochRow] = []
    t_offset = 0
    wstar = objective.minimizer
    for k, ep in enumerate(schedule.epochs, start=1):
        dw = w - wstar
        start_dist = float(dw @ dw)
        w = _descend(w, ep.eta, ep.gamma, ep.budget, oracle, domain, rng,
                     recorder, t_offset=t_offset)
        dw = w - wstar
        epoch_rows.append(EpochRow(
            k=k, D=ep.D, eta=ep.eta, gamma=ep.gamma, budget=ep.budget,
            t_start=t_offset + 1, dist_sq_start=start_dist,
            dist_sq_end=float(dw @ dw),
        ))
        t_offset += ep.budget
    consumed = oracle.query_count - before
    assert consumed == total, f"query accounting broke: {consumed} != {total}"
    return recorder.finalize(consumed, seed, w, epochs=epoch_rows)


def _require_positive(**kwargs):
    for name, v in kwargs.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v}")


def tune_smooth(eps: float, beta: float, d: int, D: float, p: int,
                c_rho: float, ctilde: float = CTILDE_DEFAULT) -> TunedParams:
    """Budget and step sizes for the general smooth convex guarantee.

    gamma = ctilde*eps / (beta*sqrt(d)*D)
    eta   = p*c_rho*ctilde^(2p-1)*eps^(2p) / (d^((2p+1)/2)*beta^p*D^(2p-1))
    T     = ceil(d^(2p+1)*beta^(2p)*D^(4p) / (p^2*(ctilde^(2p-1)*c_rho)^2*eps^(4p))) + 1
    """
    if p == 0:
        raise ValueError("p=0 is the sign case; use tune_sign")
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"p must be an integer >= 1, got {p!r}")
    _require_positive(eps=eps, beta=beta, d=d, D=D, c_rho=c_rho, ctilde=ctilde)
    gamma = ctilde * eps / (beta * math.sqrt(d) * D)
    eta = (p * c_rho * ctilde ** (2 * p - 1) * eps ** (2 * p)
           / (d ** ((2 * p + 1) / 2) * beta ** p * D ** (2 * p - 1)))
    T_raw = (d ** (2 * p + 1) * beta ** (2 * p) * D ** (4 * p)
             / (p * p * (ctilde ** (2 * p - 1) * c_rho) ** 2 * eps ** (4 * p)))
    return TunedParams(gamma=gamma, eta=eta, budget=math.ceil(T_raw) + 1)


def tune_linear(eps: float, beta: float, d: int, D: float,
                c_rho: float = 1.0) -> TunedParams:
    """Linear-transfer case: gamma = sqrt(eps/2beta), eta = c_rho*eps^1.5/(d*sqrt(2beta)),
    T = ceil(2 d^2 beta D^2 / (c_rho^2 eps^3))."""
    _require_positive(eps=eps, beta=beta, d=d, D=D, c_rho=c_rho)
    gamma = math.sqrt(eps / (2.0 * beta))
    eta = c_rho * eps ** 1.5 / (d * math.sqrt(2.0 * beta))
    T_raw = 2.0 * d * d * beta * D * D / (c_rho * c_rho * eps ** 3)
    return TunedParams(gamma=gamma, eta=eta, budget=math.ceil(T_raw))


def tune_sign(eps: float, beta: float, d: int, D: float,
              c_sign: float = C_SIGN_DEFAULT,
              ctilde: float = CTILDE_DEFAULT) -> TunedParams:
    """Sign-transfer case; the guarantee fixes only T = O(d D beta / eps).

    gamma keeps the perturbation below the gradient-scale threshold
    (||grad f|| >= eps/D at the eps-gap boundary), eta follows the
    normalized-gradient step, and T uses the configurable constant c_sign.
    """
    _require_positive(eps=eps, beta=beta, d=d, D=D, c_sign=c_sign, ctilde=ctilde)
    gamma = eps / (10.0 * beta * math.sqrt(d) * D)
    eta = ctilde * eps / (math.sqrt(d) * beta * D)
    return TunedParams(gamma=gamma, eta=eta,
                       budget=math.ceil(c_sign * d * D * beta / eps))


def tune_epoch(eps: float, alpha: float, beta: float, d: int, D: float,
               p: int, c_rho: float, ctilde: float = CTILDE_DEFAULT) -> EpochSchedule:
    """Epoch schedule for alpha-strongly convex, beta-smooth objectives.

    k_eps = ceil(log_{4/3}(beta D^2 / 2 eps)) epochs; epoch k runs
    t_k = ceil(1/(2 B^2 (D_k^2)^(2p))) steps at eta_k = B D_k^(2p+1),
    gamma_k = ctilde*alpha*D_k/(2 beta sqrt(d)), then D shrinks by sqrt(3/4).
    An empty schedule signals that every feasible point is already eps-optimal.
    """
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"p must be an integer >= 1, got {p!r}")
    _require_positive(eps=eps, alpha=alpha, beta=beta, d=d, D=D,
                      c_rho=c_rho, ctilde=ctilde)
    if alpha > beta:
        raise ValueError(f"need alpha <= beta, got alpha={alpha} > beta={beta}")
    ratio = beta * D * D / (2.0 * eps)
    k_eps = math.ceil(math.log(ratio) / math.log(4.0 / 3.0)) if ratio > 1.0 else 0
    B = ((2.0 * c_rho * p / (alpha + beta))
         * ((alpha * alpha / (4.0 * beta)) ** p * ctilde ** (2 * p - 1)
            / d ** ((2 * p + 1) / 2)))
    epochs = []
    Dk = D
    for _ in range(k_eps):
        t_raw = 1.0 / (2.0 * B * B * (Dk * Dk) ** (2 * p))
        epochs.append(EpochParams(
            D=Dk,
            eta=B * Dk ** (2 * p + 1),
            gamma=ctilde * alpha * Dk / (2.0 * beta * math.sqrt(d)),
            budget=math.ceil(t_raw),
            budget_raw=t_raw,
        ))
        Dk = Dk * math.sqrt(0.75)
    return EpochSchedule(k_eps=k_eps, epochs=tuple(epochs), B=B,
                         ctilde=ctilde, p=p, eps=eps, D=D)
