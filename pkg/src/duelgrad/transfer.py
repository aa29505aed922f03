"""Transfer functions mapping a value difference to an expected preference.

A transfer function rho maps f(x) - f(y) into [-1, 1], is anti-symmetric with
rho(0) = 0, and near the origin dominates its p-th order proxy
c_rho * sign(x) * |x|^p.  The proxy parameters (p, c_rho, r) are what the
tuning formulas consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProxyParams",
    "SeriesSpec",
    "AdmissibilityResult",
    "ProxyBoundReport",
    "TransferFunction",
    "SignTransfer",
    "LinearTransfer",
    "SigmoidTransfer",
    "PolyProxyTransfer",
    "SeriesTransfer",
    "make_transfer",
    "proxy_derivative",
    "check_admissibility",
    "verify_proxy_bound",
]


@dataclass(frozen=True)
class ProxyParams:
    """Parameters of the proxy c_rho * sign(x) * |x|^p, valid on (0, r)."""

    p: int
    c_rho: float
    r: float

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 0:
            raise ValueError(f"p must be a nonnegative integer, got {self.p!r}")
        if not (self.c_rho > 0):
            raise ValueError(f"c_rho must be positive, got {self.c_rho}")
        if not (self.r > 0):
            raise ValueError(f"r must be positive, got {self.r}")


def proxy_derivative(pp: ProxyParams, x: float) -> float:
    """Derivative c_rho * p * x^(p-1) of the proxy on x >= 0.

    p=0 is the sign case: the proxy has no derivative information, so 0 is
    returned for x > 0.  p=1 returns c_rho for every x >= 0 (0^0 == 1 here).
    """
    if x < 0:
        raise ValueError(f"proxy derivative defined on x >= 0, got {x}")
    if pp.p == 0:
        return 0.0
    if pp.p == 1:
        return pp.c_rho
    return pp.c_rho * pp.p * x ** (pp.p - 1)


@dataclass(frozen=True)
class SeriesSpec:
    """Finitely many leading series coefficients plus a uniform tail bound.

    coefficients maps degree n >= 1 to a_n; tail_bound M bounds |n a_n| for
    every degree beyond the supplied ones; radius is the convergence radius.
    """

    coefficients: dict[int, float]
    radius: float
    tail_bound: float

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("at least one series coefficient is required")
        for n, a in self.coefficients.items():
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"coefficient degrees must be integers >= 0, got {n!r}")
            if not math.isfinite(a):
                raise ValueError(f"coefficient a_{n} must be finite, got {a}")
        if not (self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.tail_bound < 0 or math.isnan(self.tail_bound):
            raise ValueError(f"tail_bound must be >= 0, got {self.tail_bound}")


@dataclass(frozen=True)
class AdmissibilityResult:
    p: int
    lower_const: float
    valid_radius: float


def check_admissibility(spec: SeriesSpec) -> AdmissibilityResult:
    """Leading-term admissibility of a series-defined transfer.

    With p the minimal nonzero degree and a_p > 0, the derivative of the
    series dominates (p a_p / 2) |x|^{p-1} for |x| < min(radius, p a_p / 4M).
    """
    nonzero = {n: a for n, a in spec.coefficients.items() if a != 0.0}
    if not nonzero:
        raise ValueError("series is identically zero; no leading term")
    p = min(nonzero)
    a_p = nonzero[p]
    if p == 0:
        raise ValueError("constant term a_0 != 0 is inadmissible (rho(0) must be 0)")
    if a_p <= 0:
        raise ValueError(f"leading coefficient a_{p} must be positive, got {a_p}")
    lower_const = 0.5 * p * a_p
    if spec.tail_bound == 0.0:
        valid_radius = spec.radius
    else:
        valid_radius = min(spec.radius, p * a_p / (4.0 * spec.tail_bound))
    return AdmissibilityResult(p=p, lower_const=lower_const, valid_radius=valid_radius)


def _check_finite(x):
    if np.any(np.isnan(x)):
        raise ValueError("transfer input must not be NaN")


class TransferFunction:
    """Base class; concrete kinds implement _eval on clean float arrays."""

    kind: str = "abstract"
    proxy: ProxyParams | None = None
    differentiable: bool = True

    def eval(self, x):
        """Evaluate rho at a scalar or array; result lies in [-1, 1]."""
        if type(x) is float or type(x) is int:  # hot path: one call per duel
            x = float(x)
            if x != x:
                raise ValueError("transfer input must not be NaN")
            return self._eval_scalar(x)
        arr = np.asarray(x, dtype=float)
        _check_finite(arr)
        out = self._eval(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    __call__ = eval

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _eval_scalar(self, x: float) -> float:
        return float(self._eval(np.float64(x)))


class SignTransfer(TransferFunction):
    """rho(x) = sign(x): noiseless comparisons, the p=0 case."""

    kind = "sign"
    differentiable = False

    def __init__(self):
        # r is a formality here; the sign proxy has no derivative content.
        self.proxy = ProxyParams(p=0, c_rho=1.0, r=math.inf)

    def _eval(self, x):
        return np.sign(x)

    def _eval_scalar(self, x):
        return 0.0 if x == 0.0 else math.copysign(1.0, x)

    def __repr__(self):
        return "SignTransfer()"


class LinearTransfer(TransferFunction):
    """rho(x) = c_rho * x, clamped to [-1, 1] outside |x| <= 1/c_rho.

    The clamp keeps the oracle mean legal for arbitrary query pairs; the
    proxy bound survives on (0, 1/c_rho).
    """

    kind = "linear"

    def __init__(self, c_rho: float = 1.0):
        if not (c_rho > 0) or not math.isfinite(c_rho):
            raise ValueError(f"c_rho must be positive and finite, got {c_rho}")
        self.c_rho = float(c_rho)
        self.proxy = ProxyParams(p=1, c_rho=self.c_rho, r=1.0 / self.c_rho)

    def _eval(self, x):
        return np.clip(self.c_rho * x, -1.0, 1.0)

    def _eval_scalar(self, x):
        return min(1.0, max(-1.0, self.c_rho * x))

    def __repr__(self):
        return f"LinearTransfer(c_rho={self.c_rho})"


class SigmoidTransfer(TransferFunction):
    """rho(x) = (1 - e^{-omega x}) / (1 + e^{-omega x}) = tanh(omega x / 2).

    The exposed proxy is the secant bound at r = 1/omega: by concavity on
    x >= 0, rho(x) >= (rho(r)/r) x on (0, r], which is the linear-case
    certificate the tuning needs.  Note this is a value bound, not a
    derivative bound: rho'(x) dips below the secant slope near r.
    """

    kind = "sigmoid"

    def __init__(self, omega: float = 1.0):
        if not (omega > 0) or not math.isfinite(omega):
            raise ValueError(f"omega must be positive and finite, got {omega}")
        self.omega = float(omega)
        r = 1.0 / self.omega
        self.proxy = ProxyParams(p=1, c_rho=self.omega * math.tanh(0.5), r=r)

    def _eval(self, x):
        # copysign forces exact anti-symmetry regardless of libm quirks
        return np.copysign(np.tanh(0.5 * self.omega * np.abs(x)), x)

    def _eval_scalar(self, x):
        # np.tanh, not math.tanh: they differ by one ulp on some inputs and
        # the scalar path must match array evaluation bit for bit
        return math.copysign(float(np.tanh(0.5 * self.omega * abs(x))), x)

    def __repr__(self):
        return f"SigmoidTransfer(omega={self.omega})"


class PolyProxyTransfer(TransferFunction):
    """rho(x) = c_rho * sign(x) * |x|^p itself, clamped to [-1, 1]."""

    kind = "polyproxy"

    def __init__(self, p: int, c_rho: float = 1.0, r: float | None = None):
        if not isinstance(p, int) or p < 1:
            raise ValueError(f"p must be an integer >= 1, got {p!r} (p=0 is SignTransfer)")
        if not (c_rho > 0) or not math.isfinite(c_rho):
            raise ValueError(f"c_rho must be positive and finite, got {c_rho}")
        self.p = p
        self.c_rho = float(c_rho)
        clamp_free = (1.0 / self.c_rho) ** (1.0 / p)
        r = clamp_free if r is None else min(r, clamp_free)
        self.proxy = ProxyParams(p=p, c_rho=self.c_rho, r=r)

    def _eval(self, x):
        return np.copysign(np.clip(self.c_rho * np.abs(x) ** self.p, 0.0, 1.0), x)

    def _eval_scalar(self, x):
        return math.copysign(min(self.c_rho * abs(x) ** self.p, 1.0), x)

    def __repr__(self):
        return f"PolyProxyTransfer(p={self.p}, c_rho={self.c_rho})"


class SeriesTransfer(TransferFunction):
    """Transfer given by its truncated series, clamped to [-1, 1].

    Evaluation uses the supplied coefficients only (the tail is controlled by
    SeriesSpec.tail_bound, not evaluated).  The series is defined on its radius;
    outside, the input saturates at the radius so the boundary value holds.
    Anti-symmetry holds iff only odd degrees are supplied; the admissibility
    checker does not require it.
    """

    kind = "series"

    def __init__(self, spec: SeriesSpec):
        self.spec = spec
        adm = check_admissibility(spec)
        self.proxy = ProxyParams(p=adm.p, c_rho=adm.lower_const / max(adm.p, 1),
                                 r=adm.valid_radius if math.isfinite(adm.valid_radius) else spec.radius)
        deg = max(spec.coefficients)
        self._poly = np.zeros(deg + 1)
        for n, a in spec.coefficients.items():
            self._poly[deg - n] = a

    def _eval(self, x):
        x = np.clip(x, -self.spec.radius, self.spec.radius)
        return np.clip(np.polyval(self._poly, x), -1.0, 1.0)

    def __repr__(self):
        return f"SeriesTransfer({self.spec})"


@dataclass(frozen=True)
class ProxyBoundReport:
    ok: bool
    max_violation: float
    worst_x: float


def verify_proxy_bound(tf: TransferFunction, pp: ProxyParams,
                       grid_points: int = 400) -> ProxyBoundReport:
    """Numerically check rho'(x) >= c_rho * p * x^(p-1) on (0, r).

    Central differences with step 1e-6*r on log-spaced abscissae.  Passes iff
    the worst violation stays below 1e-8.
    """
    if not tf.differentiable:
        raise ValueError(f"{tf.kind} transfer is not differentiable; the proxy derivative bound is vacuous")
    if grid_points < 1:
        raise ValueError(f"grid_points must be >= 1, got {grid_points}")
    r = pp.r
    if not math.isfinite(r):
        raise ValueError("proxy radius must be finite for a grid check")
    h = 1e-6 * r
    # open interval (0, r): endpoint excluded so x + h never leaves the range
    xs = np.geomspace(1e-6 * r, r, grid_points, endpoint=False)
    deriv = (tf.eval(xs + h) - tf.eval(xs - h)) / (2.0 * h)
    required = np.array([proxy_derivative(pp, float(x)) for x in xs])
    violations = required - deriv
    worst = int(np.argmax(violations))
    max_violation = float(max(violations[worst], 0.0))
    return ProxyBoundReport(ok=bool(violations[worst] <= 1e-8),
                            max_violation=max_violation,
                            worst_x=float(xs[worst]))


_KINDS = {
    "sign": SignTransfer,
    "linear": LinearTransfer,
    "sigmoid": SigmoidTransfer,
    "polyproxy": PolyProxyTransfer,
    "series": SeriesTransfer,
}


def make_transfer(kind: str, **params) -> TransferFunction:
    """Build a transfer by kind name; used by config files."""
    if kind not in _KINDS:
        raise ValueError(f"unknown transfer kind {kind!r}; choose from {sorted(_KINDS)}")
    return _KINDS[kind](**params)
