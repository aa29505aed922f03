"""duelgrad: convex optimization from noisy pairwise comparisons.

Core pieces: transfer functions (how comparison noise relates to value
differences), a simulated comparison oracle, projected relative-gradient
descent with theorem-backed tunings, Monte Carlo diagnostics for the
supporting expectation identities, and a CLI benchmark harness.
"""

from .diagnostics import (
    EstimateReport,
    check_fkm_identity,
    descent_alignment,
    estimate_ctilde,
    roundwise_progress_check,
    run_suite,
    scaled_gradient_estimate,
)
from .geometry import BallDomain, gradient_norm_lower_bound, sample_unit_sphere
from .harness import ExperimentConfig, run_experiment
from .objectives import Objective, builtin_quadratics, make_quadratic
from .oracle import ComparisonOracle, signed_bernoulli
from .solver import (
    CTILDE_DEFAULT,
    EpochSchedule,
    RunRecord,
    SolverConfig,
    TunedParams,
    epoch_rgd_run,
    rgd_run,
    rgd_step,
    tune_epoch,
    tune_linear,
    tune_sign,
    tune_smooth,
)
from .transfer import (
    LinearTransfer,
    PolyProxyTransfer,
    ProxyParams,
    SeriesSpec,
    SeriesTransfer,
    SigmoidTransfer,
    SignTransfer,
    check_admissibility,
    make_transfer,
    verify_proxy_bound,
)

__version__ = "0.1.0"
