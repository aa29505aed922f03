"""Sphere sampling and ball geometry used by the comparison-feedback solver."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Resampling threshold for degenerate Gaussian draws.  A standard normal
# vector has norm below 1e-300 with probability < 1e-600 per coordinate, so
# the loop effectively never iterates; it exists to make division safe.
_NORM_FLOOR = 1e-300


def sample_unit_sphere(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw u uniformly from the unit sphere in R^d (Gaussian normalization)."""
    return sample_unit_sphere_batch(1, d, rng)[0]


def sample_unit_sphere_batch(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n unit-sphere points as an (n, d) array.

    Consumes the generator exactly like n sequential ``sample_unit_sphere``
    calls (barring astronomically unlikely resamples), so batched and
    stepwise callers see the same stream bit for bit.  The row norms use the
    per-row pairwise reduction, which is identical for any batch size; mixing
    reduction kernels (dot vs einsum) breaks that by one ulp.
    """
    if d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    if n < 0:
        raise ValueError(f"sample count must be nonnegative, got {n}")
    g = rng.standard_normal((n, d))
    norms = np.sqrt((g * g).sum(axis=1))
    bad = norms <= _NORM_FLOOR
    while np.any(bad):  # pragma: no cover - probability ~ 0
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms[bad] = np.sqrt((g[bad] * g[bad]).sum(axis=1))
        bad = norms <= _NORM_FLOOR
    return g / norms[:, None]


def shrink_onto_ball(center: np.ndarray, radius: float, radius_sq: float,
                     dc: np.ndarray, dist_sq: float) -> np.ndarray:
    """Scale the offset dc (with ||dc||^2 = dist_sq > radius_sq) onto the
    sphere around center.

    Rounding can leave the scaled point a hair outside, which would break
    projection idempotence, so the offset recovered from the rounded point
    is rescaled until the result passes the squared-distance membership
    test.  The retry factor is (radius / ||d2||) * (1 - eps): the first term
    corrects the magnitude but can round to exactly 1 when the excess is
    below one ulp, so the second term forces strict shrinkage, with eps
    doubling on every failed attempt until the shrink clears whatever the
    coordinate grid around the center can resolve.  The overshoot of the
    accepted point is on the order of the last eps tried, so well-conditioned
    inputs settle within a couple of ulps of the sphere; only when no
    near-boundary point is representable does the offset collapse toward the
    center, and since eps is capped at 1/2 the offset at worst halves each
    round, making termination unconditional.  Shared by BallDomain.project
    and the solver's inlined projection so both produce identical bits.
    """
    d2 = (radius / math.sqrt(dist_sq)) * dc
    eps = 2.0 ** -53
    while True:
        p = center + d2
        d2 = p - center
        n2 = float(d2 @ d2)
        if n2 <= radius_sq:
            return p
        d2 = (radius / math.sqrt(n2)) * (1.0 - eps) * d2
        eps = min(2.0 * eps, 0.5)


@dataclass(frozen=True)
class BallDomain:
    """Closed Euclidean ball; the feasible set the solver projects onto."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if center.ndim != 1 or center.size < 1:
            raise ValueError("center must be a 1-d vector")
        if not np.all(np.isfinite(center)):
            raise ValueError("center must be finite")
        if not (self.radius > 0) or not np.isfinite(self.radius):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def project(self, point: np.ndarray) -> np.ndarray:
        """Euclidean projection onto the ball.

        Feasible points are returned unchanged, and the scaled result is
        guaranteed to pass the ball's own membership test, so the projection
        is exactly idempotent: project(project(x)) == project(x) bit for bit.
        """
        point = np.asarray(point, dtype=float)
        if point.shape != self.center.shape:
            raise ValueError(
                f"point has shape {point.shape}, domain is {self.center.shape}"
            )
        if not np.all(np.isfinite(point)):
            raise ValueError("cannot project a non-finite point")
        dc = point - self.center
        dist_sq = float(dc @ dc)
        radius_sq = self.radius * self.radius
        if dist_sq <= radius_sq:
            return point
        return shrink_onto_ball(self.center, self.radius, radius_sq, dc, dist_sq)

    def contains(self, point: np.ndarray, tol: float = 0.0) -> bool:
        # squared-distance test, the same metric project() uses at tol=0
        point = np.asarray(point, dtype=float)
        dc = point - self.center
        r = self.radius + tol
        return float(dc @ dc) <= r * r

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        # Uniform over the ball: uniform direction, radius ~ r^(1/d).
        u = sample_unit_sphere(self.dim, rng)
        r = self.radius * rng.random() ** (1.0 / self.dim)
        return self.center + r * u

    def sample_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n uniform ball points as an (n, d) array."""
        u = sample_unit_sphere_batch(n, self.dim, rng)
        r = self.radius * rng.random(n) ** (1.0 / self.dim)
        return self.center + r[:, None] * u


def gradient_norm_lower_bound(gap: float, dist: float) -> float:
    """Lower bound ||grad f(x)|| >= (f(x) - f(x*)) / ||x - x*|| from convexity.

    `gap` is the suboptimality f(x) - f(x*), `dist` the distance ||x - x*||.
    """
    if not np.isfinite(gap) or gap < 0:
        raise ValueError(f"gap must be finite and nonnegative, got {gap}")
    if not np.isfinite(dist) or dist <= 0:
        raise ValueError(f"dist must be finite and positive, got {dist}")
    return gap / dist
