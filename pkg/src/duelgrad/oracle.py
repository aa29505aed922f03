"""Noisy pairwise comparison channel with query accounting."""

from __future__ import annotations

import numpy as np

from .transfer import TransferFunction

# Means within one part in 1e12 of the legal range are rounding noise from
# transfer evaluation and get clamped; anything beyond is a caller bug.
_MEAN_SLACK = 1e-12


def signed_bernoulli(mu: float, rng: np.random.Generator) -> int:
    """Draw from Ber±(mu): +1 with probability (mu+1)/2, else -1."""
    if abs(mu) > 1.0 + _MEAN_SLACK or not np.isfinite(mu):
        raise ValueError(f"signed Bernoulli mean must lie in [-1, 1], got {mu}")
    mu = min(1.0, max(-1.0, mu))
    return 1 if rng.random() < 0.5 * (mu + 1.0) else -1


def signed_bernoulli_batch(mu, rng: np.random.Generator) -> np.ndarray:
    """Vectorized Ber±: one draw per entry of mu, returned as floats ±1."""
    mu = np.asarray(mu, dtype=float)
    if np.any(np.abs(mu) > 1.0 + _MEAN_SLACK) or not np.all(np.isfinite(mu)):
        raise ValueError("signed Bernoulli means must lie in [-1, 1]")
    mu = np.clip(mu, -1.0, 1.0)
    return np.where(rng.random(mu.shape) < 0.5 * (mu + 1.0), 1.0, -1.0)


class ComparisonOracle:
    """Answers "is f(x) > f(y)?" with a ±1 draw of mean rho(f(x) - f(y)).

    One oracle instance serves one run: it owns its generator and counts
    every duel.  The objective is evaluated wherever it is asked -- the
    solver's perturbed queries w ± gamma*u may step slightly outside the
    feasible ball, and that is by design.
    """

    def __init__(self, objective, transfer: TransferFunction, rng: np.random.Generator):
        self.objective = objective
        self.transfer = transfer
        self.rng = rng
        self.query_count = 0

    def duel(self, x: np.ndarray, y: np.ndarray) -> int:
        if x.shape != y.shape or x.shape != (self.objective.dim,):
            raise ValueError(
                f"duel points must have shape ({self.objective.dim},), "
                f"got {x.shape} and {y.shape}"
            )
        mu = self.transfer.eval(self.objective.value(x) - self.objective.value(y))
        self.query_count += 1
        return signed_bernoulli(mu, self.rng)

    def __repr__(self):
        return (f"ComparisonOracle(transfer={self.transfer!r}, "
                f"queries={self.query_count})")
