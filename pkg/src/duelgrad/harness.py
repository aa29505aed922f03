"""Command-line benchmark harness.

Three subcommands: `run` executes seeded multi-trial experiments and writes
trajectory/summary files, `diagnose` runs the Monte Carlo verification
suites, `tune` prints theorem-exact parameters for a given setting.  Exit
codes: 0 success, 1 failed diagnostic verdict, 2 configuration error, 3 IO
error.  Reruns with the same config and seed are byte-identical except for
the wall_time_ms column of summary.csv, which records real timing.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .diagnostics import SUITE_NAMES, run_suite
from .geometry import BallDomain
from .objectives import make_quadratic
from .oracle import ComparisonOracle
from .solver import (C_SIGN_DEFAULT, CTILDE_DEFAULT, EpochSchedule,
                     SolverConfig, TunedParams, epoch_rgd_run, rgd_run,
                     tune_epoch, tune_linear, tune_sign, tune_smooth)
from .transfer import SeriesSpec, make_transfer

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_CONFIG = 2
EXIT_IO = 3

TRAJECTORY_HEADER = "t,queries,gap,dist_sq"
SUMMARY_HEADER = "trial,seed,total_queries,min_gap,final_gap,final_dist_sq,wall_time_ms"

SEED_ENV_VAR = "DUELGRAD_SEED"


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form, for byte-stable CSV output."""
    return repr(float(x))


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ObjectiveSpec:
    kind: str = "quadratic"
    eigenvalues: tuple = (1.0, 1.0)
    minimizer: tuple = (0.0, 0.0)
    radius: float = 1.0
    center: Optional[tuple] = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass
class TransferSpec:
    kind: str = "sign"
    params: dict = field(default_factory=dict)


_TOP_KEYS = {
    "objective", "transfer", "algorithm", "tuning", "eps", "trials",
    "base_seed", "record_stride", "out", "w1", "eta", "gamma", "budget",
    "ctilde", "c_sign",
}
_OBJECTIVE_KEYS = {"kind", "eigenvalues", "minimizer", "radius", "center"}

ALGORITHMS = ("rgd", "epoch")
TUNINGS = ("theorem", "linear", "sign", "manual")


@dataclass
class ExperimentConfig:
    objective: ObjectiveSpec = field(default_factory=ObjectiveSpec)
    transfer: TransferSpec = field(default_factory=TransferSpec)
    algorithm: str = "rgd"
    tuning: str = "sign"
    eps: float = 0.1
    trials: int = 1
    base_seed: int = 0
    record_stride: Optional[int] = None
    out: str = "results"
    w1: Optional[tuple] = None
    eta: Optional[float] = None
    gamma: Optional[float] = None
    budget: Optional[int] = None
    ctilde: float = CTILDE_DEFAULT
    c_sign: float = C_SIGN_DEFAULT

    def validate(self):
        o = self.objective
        if o.kind != "quadratic":
            raise ConfigError(f"objective.kind: only 'quadratic' is available, got {o.kind!r}")
        if len(o.eigenvalues) == 0:
            raise ConfigError("objective.eigenvalues: must be non-empty")
        if len(o.minimizer) != o.dim:
            raise ConfigError(
                f"objective.minimizer: length {len(o.minimizer)} does not match "
                f"{o.dim} eigenvalues")
        if not (o.radius > 0):
            raise ConfigError(f"objective.radius: must be positive, got {o.radius}")
        if o.center is not None and len(o.center) != o.dim:
            raise ConfigError(f"objective.center: length {len(o.center)} != dim {o.dim}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm: must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.tuning not in TUNINGS:
            raise ConfigError(f"tuning: must be one of {TUNINGS}, got {self.tuning!r}")
        if self.algorithm == "epoch" and self.tuning != "theorem":
            raise ConfigError("tuning: the epoch algorithm derives its schedule from eps; "
                              "set tuning=theorem")
        if self.tuning == "manual":
            missing = [k for k in ("eta", "gamma", "budget") if getattr(self, k) is None]
            if missing:
                raise ConfigError(f"tuning: manual requires eta, gamma, budget; missing {missing}")
        if not (self.eps > 0):
            raise ConfigError(f"eps: must be positive, got {self.eps}")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if self.base_seed < 0:
            raise ConfigError(f"base_seed: must be non-negative, got {self.base_seed}")
        if self.record_stride is not None and self.record_stride < 1:
            raise ConfigError(f"record_stride: must be >= 1, got {self.record_stride}")
        if self.w1 is not None and len(self.w1) != o.dim:
            raise ConfigError(f"w1: length {len(self.w1)} != dim {o.dim}")

    def to_dict(self) -> dict:
        out = {
            "objective": {
                "kind": self.objective.kind,
                "eigenvalues": list(self.objective.eigenvalues),
                "minimizer": list(self.objective.minimizer),
                "radius": self.objective.radius,
            },
            "transfer": {"kind": self.transfer.kind, **self.transfer.params},
            "algorithm": self.algorithm,
            "tuning": self.tuning,
            "eps": self.eps,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "record_stride": self.record_stride,
            "out": self.out,
            "ctilde": self.ctilde,
            "c_sign": self.c_sign,
        }
        if self.objective.center is not None:
            out["objective"]["center"] = list(self.objective.center)
        if self.w1 is not None:
            out["w1"] = list(self.w1)
        for k in ("eta", "gamma", "budget"):
            if getattr(self, k) is not None:
                out[k] = getattr(self, k)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        obj_d = dict(data.get("objective", {}))
        unknown = set(obj_d) - _OBJECTIVE_KEYS
        if unknown:
            raise ConfigError(f"objective: unknown keys: {sorted(unknown)}")
        objective = ObjectiveSpec(
            kind=obj_d.get("kind", "quadratic"),
            eigenvalues=tuple(_floats(obj_d.get("eigenvalues", (1.0, 1.0)), "objective.eigenvalues")),
            minimizer=tuple(_floats(obj_d.get("minimizer", None), "objective.minimizer",
                                    default_zeros=len(obj_d.get("eigenvalues", (1.0, 1.0))))),
            radius=_float(obj_d.get("radius", 1.0), "objective.radius"),
            center=None if obj_d.get("center") is None
            else tuple(_floats(obj_d["center"], "objective.center")),
        )
        tr_d = dict(data.get("transfer", {"kind": "sign"}))
        kind = tr_d.pop("kind", "sign")
        transfer = TransferSpec(kind=kind, params=tr_d)
        cfg = cls(
            objective=objective,
            transfer=transfer,
            algorithm=data.get("algorithm", "rgd"),
            tuning=data.get("tuning", "sign"),
            eps=_float(data.get("eps", 0.1), "eps"),
            trials=_int(data.get("trials", 1), "trials"),
            base_seed=_int(data.get("base_seed", 0), "base_seed"),
            record_stride=None if data.get("record_stride") is None
            else _int(data["record_stride"], "record_stride"),
            out=str(data.get("out", "results")),
            w1=None if data.get("w1") is None else tuple(_floats(data["w1"], "w1")),
            eta=None if data.get("eta") is None else _float(data["eta"], "eta"),
            gamma=None if data.get("gamma") is None else _float(data["gamma"], "gamma"),
            budget=None if data.get("budget") is None else _int(data["budget"], "budget"),
            ctilde=_float(data.get("ctilde", CTILDE_DEFAULT), "ctilde"),
            c_sign=_float(data.get("c_sign", C_SIGN_DEFAULT), "c_sign"),
        )
        cfg.validate()
        return cfg


def _float(v, name: str) -> float:
    try:
        return float(v)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: expected a number, got {v!r}") from e


def _int(v, name: str) -> int:
    if isinstance(v, bool) or (not isinstance(v, int) and not float(v).is_integer()):
        raise ConfigError(f"{name}: expected an integer, got {v!r}")
    try:
        return int(v)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: expected an integer, got {v!r}") from e


def _floats(v, name: str, default_zeros: Optional[int] = None) -> list:
    if v is None:
        if default_zeros is not None:
            return [0.0] * default_zeros
        raise ConfigError(f"{name}: missing")
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"{name}: expected a list of numbers, got {v!r}")
    return [_float(x, name) for x in v]


# ---------------------------------------------------------------------------
# problem construction


def build_problem(cfg: ExperimentConfig):
    """Instantiate (objective, transfer, w1) from a validated config."""
    spec = cfg.objective
    d = spec.dim
    center = np.zeros(d) if spec.center is None else np.asarray(spec.center, dtype=float)
    domain = BallDomain(center, float(spec.radius))
    try:
        objective = make_quadratic(np.diag(spec.eigenvalues),
                                   np.asarray(spec.minimizer, dtype=float), domain)
    except ValueError as e:
        raise ConfigError(f"objective: {e}") from e
    transfer = _build_transfer(cfg.transfer)
    if cfg.w1 is None:
        w1 = center.copy()
        w1[0] += domain.radius
    else:
        w1 = np.asarray(cfg.w1, dtype=float)
        if not domain.contains(w1, tol=1e-9):
            raise ConfigError(f"w1: {list(w1)} lies outside the domain")
    return objective, transfer, w1


def _build_transfer(spec: TransferSpec):
    params = dict(spec.params)
    try:
        if spec.kind == "series":
            coeffs = params.pop("coefficients", None)
            if not isinstance(coeffs, dict):
                raise ConfigError("transfer.coefficients: expected a map degree -> coefficient")
            series = SeriesSpec(
                coefficients={int(k): float(v) for k, v in coeffs.items()},
                radius=float(params.pop("radius", math.inf)),
                tail_bound=float(params.pop("tail_bound", 0.0)),
            )
            if params:
                raise ConfigError(f"transfer: unknown series keys: {sorted(params)}")
            return make_transfer("series", spec=series)
        return make_transfer(spec.kind, **params)
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"transfer: {e}") from e


def tuned_for(cfg: ExperimentConfig, objective, transfer) -> TunedParams:
    """Resolve the (gamma, eta, T) triple for the rgd algorithm."""
    if cfg.tuning == "manual":
        return TunedParams(gamma=cfg.gamma, eta=cfg.eta, budget=cfg.budget)
    d = objective.dim
    D = objective.domain.diameter
    beta = objective.beta
    proxy = transfer.proxy
    try:
        if cfg.tuning == "theorem":
            return tune_smooth(cfg.eps, beta, d, D, p=proxy.p, c_rho=proxy.c_rho,
                               ctilde=cfg.ctilde)
        if cfg.tuning == "linear":
            return tune_linear(cfg.eps, beta, d, D, c_rho=proxy.c_rho)
        return tune_sign(cfg.eps, beta, d, D, c_sign=cfg.c_sign, ctilde=cfg.ctilde)
    except ValueError as e:
        raise ConfigError(f"tuning: {e}") from e


def epoch_schedule_for(cfg: ExperimentConfig, objective, transfer) -> EpochSchedule:
    proxy = transfer.proxy
    try:
        return tune_epoch(cfg.eps, objective.alpha, objective.beta, objective.dim,
                          objective.domain.diameter, p=proxy.p, c_rho=proxy.c_rho,
                          ctilde=cfg.ctilde)
    except ValueError as e:
        raise ConfigError(f"tuning: {e}") from e


# ---------------------------------------------------------------------------
# execution


def run_trial(cfg: ExperimentConfig, trial: int, out_dir: Path) -> dict:
    """One fully isolated trial; writes its trajectory file, returns the row."""
    objective, transfer, w1 = build_problem(cfg)
    seed = cfg.base_seed + trial
    # counter-based split: one child stream for directions, one for the oracle
    dir_ss, oracle_ss = np.random.SeedSequence(seed).spawn(2)
    oracle = ComparisonOracle(objective, transfer, np.random.default_rng(oracle_ss))
    rng_dir = np.random.default_rng(dir_ss)
    t0 = time.perf_counter()
    if cfg.algorithm == "epoch":
        schedule = epoch_schedule_for(cfg, objective, transfer)
        if schedule.trivial:
            raise ConfigError("eps: every feasible point is already eps-optimal; "
                              "nothing to run")
        record = epoch_rgd_run(schedule, w1, oracle, objective, objective.domain,
                               rng_dir, record_stride=cfg.record_stride, seed=seed)
    else:
        tuned = tuned_for(cfg, objective, transfer)
        solver_cfg = SolverConfig(eta=tuned.eta, gamma=tuned.gamma,
                                  budget=tuned.budget, w1=w1)
        record = rgd_run(solver_cfg, oracle, objective, objective.domain,
                         rng_dir, record_stride=cfg.record_stride, seed=seed)
    wall_ms = (time.perf_counter() - t0) * 1e3
    _write_trajectory(out_dir / f"trial_{trial:04d}.csv", record)
    return {
        "trial": trial,
        "seed": seed,
        "total_queries": record.total_queries,
        "min_gap": record.min_gap,
        "final_gap": record.final_gap,
        "final_dist_sq": record.final_dist_sq,
        "wall_time_ms": wall_ms,
    }


def _write_trajectory(path: Path, record):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for t, q, g, ds in zip(record.t, record.queries, record.gap, record.dist_sq):
            fh.write(f"{int(t)},{int(q)},{_fmt(g)},{_fmt(ds)}\n")


def _trial_task(payload):
    cfg_dict, trial = payload
    cfg = ExperimentConfig.from_dict(cfg_dict)
    return run_trial(cfg, trial, Path(cfg.out))


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> dict:
    """Run all trials, write per-trial CSVs plus summary.csv/summary.json.

    Returns the summary dict (the same object serialized to summary.json,
    which carries no timing so reruns are byte-identical).
    """
    cfg.validate()
    build_problem(cfg)  # surface problem-construction errors before any IO
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if jobs > 1 and cfg.trials > 1:
        payloads = [(cfg.to_dict(), i) for i in range(cfg.trials)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_trial_task, payloads))
    else:
        rows = [run_trial(cfg, i, out_dir) for i in range(cfg.trials)]
    rows.sort(key=lambda r: r["trial"])

    with open(out_dir / "summary.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for r in rows:
            fh.write(f"{r['trial']},{r['seed']},{r['total_queries']},"
                     f"{_fmt(r['min_gap'])},{_fmt(r['final_gap'])},"
                     f"{_fmt(r['final_dist_sq'])},{_fmt(r['wall_time_ms'])}\n")

    min_gaps = [r["min_gap"] for r in rows]
    reached = sum(1 for g in min_gaps if g <= cfg.eps)
    summary = {
        "config": cfg.to_dict(),
        "trials": cfg.trials,
        "eps": cfg.eps,
        "aggregate": {
            "mean_min_gap": statistics.fmean(min_gaps),
            "median_min_gap": statistics.median(min_gaps),
            "frac_min_gap_le_eps": reached / cfg.trials,
            "mean_total_queries": statistics.fmean(r["total_queries"] for r in rows),
        },
        "per_trial": [
            {k: r[k] for k in ("trial", "seed", "total_queries", "min_gap",
                               "final_gap", "final_dist_sq")}
            for r in rows
        ],
    }
    with open(out_dir / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary


# ---------------------------------------------------------------------------
# CLI


def _parse_vector(text: str, flag: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as e:
        raise ConfigError(f"{flag}: expected comma-separated numbers, got {text!r}") from e


def _env_seed() -> Optional[int]:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{SEED_ENV_VAR}: expected an integer, got {raw!r}") from e


def _config_data_from_args(args) -> dict:
    data: dict = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigError(f"config file: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config file: top level must be an object")

    obj = dict(data.get("objective", {}))
    if args.eigenvalues is not None:
        obj["eigenvalues"] = list(_parse_vector(args.eigenvalues, "--eigenvalues"))
    if args.minimizer is not None:
        obj["minimizer"] = list(_parse_vector(args.minimizer, "--minimizer"))
    if args.radius is not None:
        obj["radius"] = args.radius
    if args.center is not None:
        obj["center"] = list(_parse_vector(args.center, "--center"))
    if obj:
        data["objective"] = obj

    tr = dict(data.get("transfer", {}))
    if args.transfer is not None:
        tr = {"kind": args.transfer}  # switching kind drops file-level params
    for name in ("c_rho", "omega", "p", "r"):
        v = getattr(args, name)
        if v is not None:
            tr[name] = v
    if tr:
        data["transfer"] = tr

    for name in ("algorithm", "tuning", "eps", "trials", "out", "eta", "gamma",
                 "budget", "ctilde", "c_sign"):
        v = getattr(args, name)
        if v is not None:
            data[name] = v
    if args.stride is not None:
        data["record_stride"] = args.stride
    if args.w1 is not None:
        data["w1"] = list(_parse_vector(args.w1, "--w1"))

    if args.seed is not None:
        data["base_seed"] = args.seed
    elif "base_seed" not in data:
        env = _env_seed()
        if env is not None:
            data["base_seed"] = env
    return data


def _cmd_run(args) -> int:
    cfg = ExperimentConfig.from_dict(_config_data_from_args(args))
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    if jobs < 1:
        raise ConfigError(f"--jobs: must be >= 1, got {jobs}")
    summary = run_experiment(cfg, jobs=jobs)
    agg = summary["aggregate"]
    print(f"trials={cfg.trials} mean_min_gap={_fmt(agg['mean_min_gap'])} "
          f"median_min_gap={_fmt(agg['median_min_gap'])} "
          f"frac_min_gap_le_eps={_fmt(agg['frac_min_gap_le_eps'])}")
    print(f"wrote {cfg.out}/summary.csv, {cfg.out}/summary.json and "
          f"{cfg.trials} trajectory files")
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    seed = args.seed
    if seed is None:
        seed = _env_seed()
    if seed is None:
        seed = 0
    if args.n < 10_000:
        raise ConfigError(f"--n: need at least 10^4 samples, got {args.n}")
    reports = run_suite(args.suite, args.n, np.random.default_rng(seed))
    payload = {
        "suite": args.suite,
        "seed": seed,
        "n": args.n,
        "reports": [_report_json(r) for r in reports],
    }
    text = json.dumps(payload, indent=2)
    if args.out is not None:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    for r in reports:
        print(_report_line(r))
    passed = sum(1 for r in reports if _report_verdict(r))
    print(f"{passed}/{len(reports)} checks passed")
    return EXIT_OK if passed == len(reports) else EXIT_VERDICT


def _report_verdict(r) -> bool:
    return bool(r.verdict) if hasattr(r, "verdict") else bool(r.passed)


def _report_json(r) -> dict:
    if hasattr(r, "to_json_dict"):
        return r.to_json_dict()
    return {
        "name": r.name,
        "objective": r.objective,
        "verdict": bool(r.passed),
        "max_violation": r.max_violation,
        "n": r.n_pairs,
    }


def _report_line(r) -> str:
    if hasattr(r, "to_json_dict"):
        return str(r)
    status = "pass" if r.passed else "FAIL"
    return (f"{r.name}[{r.objective}]: {status} "
            f"max_violation={r.max_violation:.3g} n={r.n_pairs}")


def _cmd_tune(args) -> int:
    try:
        if args.algorithm == "epoch":
            if args.alpha is None:
                raise ConfigError("--alpha: required for epoch tuning")
            schedule = tune_epoch(args.eps, args.alpha, args.beta, args.d, args.D,
                                  p=args.p, c_rho=args.c_rho, ctilde=args.ctilde)
            if schedule.trivial:
                print("trivial: every feasible point is ε-optimal")
                return EXIT_OK
            print(f"k_eps = {schedule.k_eps}")
            print(f"B = {schedule.B:.12g}")
            print("k,D_k,eta_k,gamma_k,t_k")
            for k, ep in enumerate(schedule.epochs, start=1):
                print(f"{k},{ep.D:.12g},{ep.eta:.12g},{ep.gamma:.12g},{ep.budget}")
            print(f"total_budget = {schedule.total_budget}")
            return EXIT_OK
        if args.tuning == "theorem":
            tuned = tune_smooth(args.eps, args.beta, args.d, args.D,
                                p=args.p, c_rho=args.c_rho, ctilde=args.ctilde)
        elif args.tuning == "linear":
            tuned = tune_linear(args.eps, args.beta, args.d, args.D, c_rho=args.c_rho)
        else:
            tuned = tune_sign(args.eps, args.beta, args.d, args.D,
                              c_sign=args.c_sign, ctilde=args.ctilde)
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from e
    print(f"gamma = {tuned.gamma:.12g}")
    print(f"eta = {tuned.eta:.12g}")
    print(f"T = {tuned.budget}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duelgrad",
        description="Convex optimization from noisy pairwise comparisons: "
                    "benchmark runs, Monte Carlo diagnostics, parameter tuning.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute seeded trials and write CSV/JSON results")
    run_p.add_argument("--config", type=str, default=None, help="JSON config file; flags override it")
    run_p.add_argument("--seed", type=int, default=None, help="base seed (trial i uses base+i)")
    run_p.add_argument("--trials", type=int, default=None)
    run_p.add_argument("--jobs", type=int, default=None, help="worker processes (default: cores)")
    run_p.add_argument("--out", type=str, default=None, help="output directory")
    run_p.add_argument("--stride", type=int, default=None, help="record every Nth iterate")
    run_p.add_argument("--algorithm", choices=ALGORITHMS, default=None)
    run_p.add_argument("--tuning", choices=TUNINGS, default=None)
    run_p.add_argument("--eps", type=float, default=None, help="target suboptimality gap")
    run_p.add_argument("--eta", type=float, default=None, help="manual step size")
    run_p.add_argument("--gamma", type=float, default=None, help="manual perturbation radius")
    run_p.add_argument("--budget", type=int, default=None, help="manual iteration count")
    run_p.add_argument("--transfer", type=str, default=None,
                       help="transfer kind: sign | linear | sigmoid | polyproxy | series")
    run_p.add_argument("--c-rho", dest="c_rho", type=float, default=None)
    run_p.add_argument("--omega", type=float, default=None)
    run_p.add_argument("--p", type=int, default=None)
    run_p.add_argument("--r", type=float, default=None)
    run_p.add_argument("--eigenvalues", type=str, default=None, help="comma-separated, e.g. 1,0.5")
    run_p.add_argument("--minimizer", type=str, default=None, help="comma-separated vector")
    run_p.add_argument("--radius", type=float, default=None, help="domain ball radius")
    run_p.add_argument("--center", type=str, default=None, help="domain center (default origin)")
    run_p.add_argument("--w1", type=str, default=None, help="initial iterate (default center + radius*e1)")
    run_p.add_argument("--ctilde", type=float, default=None)
    run_p.add_argument("--c-sign", dest="c_sign", type=float, default=None)
    run_p.set_defaults(func=_cmd_run)

    diag_p = sub.add_parser("diagnose", help="run Monte Carlo verification suites")
    diag_p.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    diag_p.add_argument("--seed", type=int, default=None)
    diag_p.add_argument("--n", type=int, default=1_000_000, help="samples per estimate")
    diag_p.add_argument("--out", type=str, default=None, help="write the JSON report here")
    diag_p.set_defaults(func=_cmd_diagnose)

    tune_p = sub.add_parser("tune", help="print theorem-exact parameters")
    tune_p.add_argument("--algorithm", choices=ALGORITHMS, default="rgd")
    tune_p.add_argument("--tuning", choices=("theorem", "linear", "sign"), default="theorem")
    tune_p.add_argument("--eps", type=float, required=True)
    tune_p.add_argument("--beta", type=float, required=True)
    tune_p.add_argument("--d", type=int, required=True)
    tune_p.add_argument("--D", type=float, required=True)
    tune_p.add_argument("--alpha", type=float, default=None)
    tune_p.add_argument("--p", type=int, default=1)
    tune_p.add_argument("--c-rho", dest="c_rho", type=float, default=1.0)
    tune_p.add_argument("--ctilde", type=float, default=CTILDE_DEFAULT)
    tune_p.add_argument("--c-sign", dest="c_sign", type=float, default=C_SIGN_DEFAULT)
    tune_p.set_defaults(func=_cmd_tune)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
