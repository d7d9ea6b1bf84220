"""Command-line orchestration: configure, run, and report experiment suites.

    transferlab run --experiment <id> [options] --out DIR

Experiment ids: random-sum, na-field, semistable, allocations, psi-law.
Options may also be given in a flat key-value JSON file via --config; command
line flags override file values. Every run writes ``report.json`` and one CSV
per CDF comparison into the output directory. Exit codes: 0 all checks pass,
2 some check failed (reports are still written), 1 usage or config error.

Worker parallelism is capped by the TRANSFERLAB_WORKERS environment
variable; reports do not depend on it.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .distributions import (
    DiscreteMixing,
    LogarithmicLaw,
    MixingLaw,
    uniform_box_mixing,
)
from .engine import ReplicationPlan, SeedSpec
from .experiments.allocations import (
    AllocationConfig,
    AllocationConfigError,
    resolve_branches,
    run_allocations,
)
from .experiments.na_field import NAFieldConfig, field_lag_covariances, run_na_field
from .experiments.random_sum import (
    RandomSumConfig,
    powers_of_two,
    run_random_sum,
    squares,
)
from .experiments.semistable import (
    MantissaPushforward,
    SemistableConfig,
    mantissa_jump_points,
    mantissa_pushforward_cdf,
    run_semistable_demo,
    sup_distance_to_log_law,
)
from .gof import GofReport, ks_one_sample, ks_two_sample, wasserstein1
from .reporting import write_ecdf_csv, write_report

EXPERIMENTS = ("random-sum", "na-field", "semistable", "allocations", "psi-law")

_COMMON_DEFAULTS = {"seed": 42, "replicates": 10_000, "alpha": 0.01}

_DEFAULTS = {
    "random-sum": {"stage": 14, "d": 1, "rho": "uniform:0,2", "kn": "pow2"},
    "na-field": {"a": 0.5, "d": 1, "n": None, "rho": "point:1"},
    "semistable": {"horizon": 1e60, "fixed_block": 40},
    "allocations": {"r": 0, "path": "central", "boxes": 10_000},
    "psi-law": {"n": 1_000_000, "c": 2.0, "tolerance": 0.15},
}


class CliError(Exception):
    """Usage or configuration error; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise CliError(f"{message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="transferlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run one experiment suite", add_help=True)
    run.add_argument("--experiment", required=True, help="|".join(EXPERIMENTS))
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--config", help="flat JSON config file; flags override it")
    run.add_argument("--seed", type=int)
    run.add_argument("--replicates", type=int)
    run.add_argument("--alpha", type=float)
    run.add_argument("--n", type=float, help="psi-law horizon / na-field lattice size")
    run.add_argument("--c", type=float, help="psi-law geometric ratio (only 2)")
    run.add_argument("--tolerance", type=float, help="psi-law sup-distance bound")
    run.add_argument("--stage", type=int, help="random-sum array stage")
    run.add_argument("--d", type=int, help="index dimension")
    run.add_argument("--rho", help="index mixing: point:T[,T2] or uniform:LO,HI")
    run.add_argument("--kn", choices=("pow2", "square"), help="sampling sequence")
    run.add_argument("--a", type=float, help="na-field difference coefficient")
    run.add_argument("--r", type=int, help="allocations count level")
    run.add_argument("--N", dest="boxes", type=int, help="allocations box count")
    run.add_argument("--path", help="allocations path kind")
    run.add_argument("--horizon", type=float, help="semistable index horizon")
    run.add_argument("--fixed-block", dest="fixed_block", type=int)
    return parser


def _resolve_config(args: argparse.Namespace) -> dict:
    experiment = args.experiment
    if experiment not in EXPERIMENTS:
        raise CliError(
            f"unknown experiment {experiment!r}; choose one of {', '.join(EXPERIMENTS)}"
        )
    config = {"experiment": experiment}
    config.update(_COMMON_DEFAULTS)
    config.update(_DEFAULTS[experiment])
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise CliError(f"config file {path} does not exist")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CliError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CliError(f"config file {path} must hold a flat JSON object")
        unknown = set(loaded) - set(config) - {"out"}
        if unknown:
            raise CliError(f"config file keys not understood: {sorted(unknown)}")
        config.update(loaded)
    for key in config:
        if key == "experiment":
            continue
        flag = getattr(args, key, None)
        if flag is not None:
            config[key] = flag
    return config


def _parse_mixing(spec: str, d: int) -> MixingLaw:
    kind, _, rest = str(spec).partition(":")
    try:
        values = [float(v) for v in rest.split(",")] if rest else []
    except ValueError as exc:
        raise CliError(f"bad mixing spec {spec!r}: {exc}") from exc
    if kind == "point":
        if len(values) == 1:
            values = values * d
        if len(values) != d:
            raise CliError(f"point mixing needs 1 or {d} coordinates, got {spec!r}")
        atom = values[0] if d == 1 else tuple(values)
        return DiscreteMixing([(atom, 1.0)])
    if kind == "uniform":
        if len(values) != 2:
            raise CliError(f"uniform mixing needs LO,HI, got {spec!r}")
        lo, hi = values
        return uniform_box_mixing([(lo, hi)] * d)
    raise CliError(f"unknown mixing kind {kind!r} in {spec!r}")


def _ecdf_series(emp, target):
    xs = emp.values
    return xs, np.arange(1, xs.size + 1) / xs.size, target.cdf_many(xs)


def _run_random_sum(config, out):
    if config["kn"] not in ("pow2", "square"):
        raise CliError(f"unknown sampling sequence {config['kn']!r}")
    k_seq = powers_of_two if config["kn"] == "pow2" else squares
    d = int(config["d"])
    cfg = RandomSumConfig(
        stage=int(config["stage"]),
        mixing=_parse_mixing(config["rho"], d),
        dimension=d,
        k_seq=k_seq,
    )
    plan = ReplicationPlan(int(config["replicates"]), SeedSpec(int(config["seed"])))
    emp, target = run_random_sum(cfg, plan)
    check = ks_one_sample(emp, target, alpha=config["alpha"], name="ks_vs_mixture")
    xs, f_emp, f_tgt = _ecdf_series(emp, target)
    write_ecdf_csv(out / "ks_vs_mixture.csv", xs, f_emp, f_tgt)
    return [check]


def _run_na_field(config, out):
    d = int(config["d"])
    lattice_n = config["n"]
    if lattice_n is None:
        lattice_n = 10_000 if d == 1 else 200
    lattice = (int(lattice_n),) * d
    cfg = NAFieldConfig(
        a=float(config["a"]),
        lattice=lattice,
        mixing=_parse_mixing(config["rho"], d),
    )
    seed = SeedSpec(int(config["seed"]))
    replicates = int(config["replicates"])
    plan = ReplicationPlan(replicates, seed)
    emp, target = run_na_field(cfg, plan)
    checks = [ks_one_sample(emp, target, alpha=config["alpha"], name="ks_vs_mixture")]
    # covariance diagnostics use the stream right after the replicate range
    covs = field_lag_covariances(cfg, seed.stream(replicates))
    cells = 1_000_000
    checks.append(
        GofReport("lag1_covariance_error", abs(covs["lag_e1"] + cfg.a), cells, None, 0.02)
    )
    checks.append(
        GofReport("lag2_covariance_error", abs(covs["lag_2e1"]), cells, None, 0.02)
    )
    if d >= 2:
        checks.append(
            GofReport("lag_e2_covariance_error", abs(covs["lag_e2"]), cells, None, 0.02)
        )
    xs, f_emp, f_tgt = _ecdf_series(emp, target)
    write_ecdf_csv(out / "ks_vs_mixture.csv", xs, f_emp, f_tgt)
    return checks


def _run_semistable(config, out):
    cfg = SemistableConfig(
        horizon=float(config["horizon"]), fixed_block=int(config["fixed_block"])
    )
    plan = ReplicationPlan(int(config["replicates"]), SeedSpec(int(config["seed"])))
    result = run_semistable_demo(cfg, plan)
    alpha = config["alpha"]
    checks = [
        ks_two_sample(
            result.random_index,
            result.fixed_block_mixture,
            alpha=alpha,
            name="ks_random_index_vs_fixed_block_mixture",
        ),
        ks_one_sample(
            result.mantissa_marginal,
            result.mantissa_law,
            alpha=alpha,
            name="ks_mantissa_marginal",
        ),
    ]
    a = result.random_index
    b = result.fixed_block_mixture
    xs = a.values
    write_ecdf_csv(out / "ks_ab.csv", xs, a.cdf_many(xs), b.cdf_many(xs))
    xs = result.mantissa_marginal.values
    write_ecdf_csv(
        out / "mantissa_marginal.csv",
        xs,
        result.mantissa_marginal.cdf_many(xs),
        result.mantissa_law.cdf_many(xs),
    )
    return checks


def _run_allocations(config, out):
    try:
        cfg = AllocationConfig(
            r=int(config["r"]), path=str(config["path"]), boxes=int(config["boxes"])
        )
        branches = resolve_branches(cfg)
    except AllocationConfigError as exc:
        raise CliError(str(exc)) from exc
    replicates = int(config["replicates"])
    plan = ReplicationPlan(replicates, SeedSpec(int(config["seed"])))
    emp, target = run_allocations(cfg, plan)
    checks = [ks_one_sample(emp, target, alpha=config["alpha"], name="ks_vs_regime_law")]
    checks.append(
        GofReport(
            "standardized_mean_error",
            abs(emp.mean()),
            replicates,
            None,
            4.0 / math.sqrt(replicates),
        )
    )
    # the 0.05 variance tolerance is stated at 10^4 replicates; smaller runs
    # get the CLT-scaled equivalent
    var_tol = 0.05 * max(1.0, math.sqrt(10_000.0 / replicates))
    checks.append(
        GofReport(
            "standardized_variance_error", abs(emp.variance() - 1.0), replicates, None, var_tol
        )
    )
    xs, f_emp, f_tgt = _ecdf_series(emp, target)
    write_ecdf_csv(out / "ks_vs_regime_law.csv", xs, f_emp, f_tgt)
    return checks


def _run_psi_law(config, out):
    if float(config["c"]) != 2.0:
        raise CliError("only the geometric ratio c = 2 is implemented")
    horizon = int(config["n"])
    if not 1 <= horizon <= 4_000_000:
        raise CliError(f"psi-law horizon must be in [1, 4e6], got {horizon}")
    sup = sup_distance_to_log_law(horizon)
    checks = [
        GofReport("psi_sup_distance_to_log_law", sup, horizon, None, float(config["tolerance"]))
    ]
    jumps = mantissa_jump_points(horizon)
    f_push = np.asarray(mantissa_pushforward_cdf(horizon, jumps))
    write_ecdf_csv(out / "psi_cdf.csv", jumps, f_push, LogarithmicLaw(2.0).cdf_many(jumps))
    return checks


_RUNNERS = {
    "random-sum": _run_random_sum,
    "na-field": _run_na_field,
    "semistable": _run_semistable,
    "allocations": _run_allocations,
    "psi-law": _run_psi_law,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command != "run":
            raise CliError(parser.format_usage())
        config = _resolve_config(args)
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CliError(f"cannot create output directory {out}: {exc}") from exc
        started = time.perf_counter()
        checks = _RUNNERS[config["experiment"]](config, out)
        runtime = time.perf_counter() - started
        write_report(out, config, int(config["seed"]), checks, runtime)
        for check in checks:
            print(check.summary())
        print(f"report written to {out / 'report.json'}")
        return 0 if all(c.passed for c in checks) else 2
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
