"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with ``-s`` or read the
captured output). Monte Carlo criteria run under the fixed master seed 42;
the replication engine makes every number here reproducible bit for bit.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from oracles import enumerate_occupancy_moments
from transferlab.cli import main as cli_main
from transferlab.distributions import (
    DiscreteMixing,
    EmpiricalDistribution,
    LimitFamily,
    LogarithmicLaw,
    MixtureLaw,
    Normal,
    PointMass,
    PoissonLattice,
    StandardizedPoisson,
    Uniform,
    gaussian_variance_family,
    gaussian_variance_mixture,
    mixture_cdf,
    uniform_box_mixing,
)
from transferlab.engine import ReplicationPlan, SeedSpec
from transferlab.experiments.allocations import (
    AllocationConfig,
    occupancy_mean,
    occupancy_variance,
    run_allocations,
)
from transferlab.experiments.na_field import (
    NAFieldConfig,
    field_lag_covariances,
    run_na_field,
)
from transferlab.experiments.random_sum import RandomSumConfig, run_random_sum
from transferlab.experiments.semistable import (
    SemistableConfig,
    run_semistable_demo,
    sup_distance_to_log_law,
)
from transferlab.gof import ks_one_sample, ks_two_sample

MASTER_SEED = 42
ALPHA = 0.01
REPLICATES = 10_000


def plan(offset=0, replicates=REPLICATES):
    return ReplicationPlan(replicates=replicates, seed=SeedSpec(MASTER_SEED, offset))


def announce(criterion: str, passed: bool, detail: str) -> bool:
    print(f"{'PASS' if passed else 'FAIL'} - {criterion}: {detail}")
    return passed


def test_criterion_1_exact_allocation_moments():
    started = time.perf_counter()
    worst = 0.0
    for big_n in range(1, 7):
        for n in range(1, 7):
            for r in range(0, n + 1):
                mean_ref, var_ref = enumerate_occupancy_moments(r, n, big_n)
                worst = max(
                    worst,
                    abs(occupancy_mean(r, n, big_n) - mean_ref),
                    abs(occupancy_variance(r, n, big_n) - var_ref),
                )
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-12 and elapsed < 10.0
    assert announce(
        "criterion 1 (exact occupancy moments vs enumeration)",
        ok,
        f"max abs deviation {worst:.2e} over all n,N<=6, runtime {elapsed:.1f}s",
    )


def test_criterion_2_mantissa_law_convergence():
    started = time.perf_counter()
    distances = {n: sup_distance_to_log_law(n) for n in (10**2, 10**3, 10**4, 10**5, 10**6)}
    elapsed = time.perf_counter() - started
    series = list(distances.values())
    monotone = all(b <= a * 1.1 for a, b in zip(series, series[1:]))
    ok = monotone and distances[10**6] <= 0.15 and elapsed < 5.0
    assert announce(
        "criterion 2 (mantissa pushforward -> logarithmic law)",
        ok,
        f"sup distances {['%.4f' % v for v in series]}, runtime {elapsed:.1f}s",
    )


def test_criterion_3_random_sum_transfer():
    started = time.perf_counter()
    cfg = RandomSumConfig(stage=14, mixing=uniform_box_mixing([(0.0, 2.0)]))
    emp, target = run_random_sum(cfg, plan(1_000_000))
    report = ks_one_sample(emp, target, alpha=ALPHA, name="random-sum")
    elapsed = time.perf_counter() - started
    ok = report.passed and elapsed < 60.0
    assert announce(
        "criterion 3 (random-sum mixture law, rho uniform[0,2], k_n=2^14)",
        ok,
        f"KS {report.statistic:.4f} vs critical {report.critical:.4f}, runtime {elapsed:.0f}s",
    )


def test_criterion_4_na_field_mixture():
    started = time.perf_counter()
    combos = {
        "d=1 point": NAFieldConfig(
            a=0.5, lattice=(10_000,), mixing=DiscreteMixing([(1.0, 1.0)])
        ),
        "d=1 uniform": NAFieldConfig(
            a=0.5, lattice=(10_000,), mixing=uniform_box_mixing([(0.0, 2.0)])
        ),
        "d=2 point": NAFieldConfig(
            a=0.5, lattice=(200, 200), mixing=DiscreteMixing([((1.0, 1.0), 1.0)])
        ),
        "d=2 uniform": NAFieldConfig(
            a=0.5, lattice=(200, 200), mixing=uniform_box_mixing([(0.0, 2.0), (0.0, 2.0)])
        ),
    }
    details = []
    all_ok = True
    for offset, (label, cfg) in enumerate(combos.items()):
        emp, target = run_na_field(cfg, plan(2_000_000 + offset * 100_000))
        report = ks_one_sample(emp, target, alpha=ALPHA, name=label)
        details.append(f"{label} KS {report.statistic:.4f}/{report.critical:.4f}")
        all_ok &= report.passed
    covs1 = field_lag_covariances(combos["d=1 point"], SeedSpec(MASTER_SEED, 10**7))
    covs2 = field_lag_covariances(combos["d=2 point"], SeedSpec(MASTER_SEED, 10**7 + 1))
    cov_ok = abs(covs1["lag_e1"] + 0.5) < 0.02 and abs(covs2["lag_e1"] + 0.5) < 0.02
    details.append(f"lag-1 covariances {covs1['lag_e1']:.4f}, {covs2['lag_e1']:.4f}")
    elapsed = time.perf_counter() - started
    ok = all_ok and cov_ok and elapsed < 300.0
    assert announce(
        "criterion 4 (negatively associated field mixture)",
        ok,
        "; ".join(details) + f", runtime {elapsed:.0f}s",
    )


def test_criterion_5_allocation_regimes():
    started = time.perf_counter()
    details = []
    all_ok = True
    offset = 3_000_000
    for r in (0, 1, 2):
        kinds = ["central", "sparse", "dense", "two-point"] if r == 0 else [
            "central",
            "dense",
            "two-point",
        ]
        for kind in kinds:
            cfg = AllocationConfig(r=r, path=kind, boxes=10_000)
            emp, target = run_allocations(cfg, plan(offset))
            offset += 100_000
            report = ks_one_sample(emp, target, alpha=ALPHA, name=f"r={r} {kind}")
            details.append(f"r={r} {kind} {report.statistic:.4f}/{report.critical:.4f}")
            all_ok &= report.passed
    elapsed = time.perf_counter() - started
    ok = all_ok and elapsed < 600.0
    assert announce(
        "criterion 5 (allocation regimes, N=10^4)",
        ok,
        "; ".join(details) + f", runtime {elapsed:.0f}s",
    )


def test_criterion_6_semistable_self_consistency():
    started = time.perf_counter()
    result = run_semistable_demo(SemistableConfig(), plan(4_000_000))
    report = ks_two_sample(
        result.random_index, result.fixed_block_mixture, alpha=ALPHA
    )
    marginal = ks_one_sample(result.mantissa_marginal, result.mantissa_law, alpha=ALPHA)
    elapsed = time.perf_counter() - started
    ok = report.passed and marginal.passed and elapsed < 120.0
    assert announce(
        "criterion 6 (heavy-tailed random index vs fixed-block mixture)",
        ok,
        f"two-sample KS {report.statistic:.4f}/{report.critical:.4f}, "
        f"mantissa marginal KS {marginal.statistic:.4f}/{marginal.critical:.4f}, "
        f"runtime {elapsed:.0f}s",
    )


def _strip_runtime(out: Path) -> str:
    payload = json.loads((out / "report.json").read_text())
    del payload["runtime_seconds"]
    return json.dumps(payload, sort_keys=True)


def _csv_bytes(out: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}


def test_criterion_7_determinism_and_parallel_equivalence(tmp_path, monkeypatch):
    started = time.perf_counter()
    runs = {
        "random-sum": ["--stage", "8", "--replicates", "400"],
        "na-field": ["--n", "400", "--replicates", "400"],
        "semistable": ["--horizon", "1e12", "--replicates", "300"],
        "allocations": ["--N", "500", "--replicates", "400", "--path", "sparse"],
        "psi-law": ["--n", "20000"],
    }
    all_ok = True
    details = []
    for experiment, extra in runs.items():
        outs = [tmp_path / f"{experiment}-{i}" for i in range(3)]
        for out, workers in zip(outs, ("1", "1", "4")):
            monkeypatch.setenv("TRANSFERLAB_WORKERS", workers)
            code = cli_main(
                ["run", "--experiment", experiment, "--seed", "42", "--out", str(out)]
                + extra
            )
            assert code in (0, 2), experiment
        same_rerun = _strip_runtime(outs[0]) == _strip_runtime(outs[1]) and _csv_bytes(
            outs[0]
        ) == _csv_bytes(outs[1])
        same_parallel = _strip_runtime(outs[0]) == _strip_runtime(outs[2]) and _csv_bytes(
            outs[0]
        ) == _csv_bytes(outs[2])
        all_ok &= same_rerun and same_parallel
        details.append(
            f"{experiment}: rerun {'=' if same_rerun else '!='}, "
            f"4-workers {'=' if same_parallel else '!='}"
        )
    elapsed = time.perf_counter() - started
    assert announce(
        "criterion 7 (byte-identical reports across runs and worker counts)",
        all_ok,
        "; ".join(details) + f", runtime {elapsed:.0f}s",
    )


def test_criterion_8_distribution_self_tests():
    started = time.perf_counter()
    sparse_mean = occupancy_mean(0, 142, 10_000)
    sparse_sd = math.sqrt(occupancy_variance(0, 142, 10_000))
    builtins = {
        "normal(0,1)": Normal(0.0, 1.0),
        "normal(0,0.25)": Normal(0.0, 0.25),
        "uniform[0,2]": Uniform(0.0, 2.0),
        "log-law(2)": LogarithmicLaw(2.0),
        "std-poisson(1)": StandardizedPoisson(1.0),
        "std-poisson(2)": StandardizedPoisson(2.0),
        "point-mass(0)": PointMass(0.0),
        "poisson-lattice": PoissonLattice(
            1.0, loc=sparse_mean, scale=sparse_sd, offset=int(round(sparse_mean - 1.0))
        ),
        "mixture point": MixtureLaw(gaussian_variance_family(1.0), DiscreteMixing([(1.0, 1.0)])),
        "mixture uniform[1,2]": MixtureLaw(
            gaussian_variance_family(1.0), uniform_box_mixing([(1.0, 2.0)])
        ),
        "mixture uniform[0,2] scaled": MixtureLaw(
            gaussian_variance_family(0.25), uniform_box_mixing([(0.0, 2.0)])
        ),
        "mixture product d=2": gaussian_variance_mixture(
            0.25, uniform_box_mixing([(0.0, 2.0), (0.0, 2.0)])
        ),
        "mixture normal+poisson": MixtureLaw(
            LimitFamily(lambda t: Normal(0.0, 1.0) if t == 0.0 else StandardizedPoisson(1.0 / t)),
            DiscreteMixing([(0.0, 0.5), (1.0, 0.5)]),
        ),
    }
    details = []
    all_ok = True
    for offset, (label, law) in enumerate(builtins.items()):
        rng = SeedSpec(MASTER_SEED, 10**8 + offset).generator()
        emp = EmpiricalDistribution(law.sample_many(rng, 100_000))
        report = ks_one_sample(emp, law, alpha=ALPHA, name=label)
        ok = report.statistic < 0.0075
        all_ok &= ok
        details.append(f"{label} {report.statistic:.5f}")
    # discrete mixture CDF equals the hand-computed weighted sum to 1e-14
    family = LimitFamily(lambda t: Normal(0.0, t))
    law = MixtureLaw(family, DiscreteMixing([(0.5, 0.25), (1.0, 0.25), (2.0, 0.5)]))
    hand_ok = True
    for x in np.linspace(-3.0, 3.0, 13):
        hand = (
            0.25 * Normal(0.0, 0.5).cdf(x)
            + 0.25 * Normal(0.0, 1.0).cdf(x)
            + 0.5 * Normal(0.0, 2.0).cdf(x)
        )
        hand_ok &= abs(mixture_cdf(law, float(x)) - hand) <= 1e-14
    elapsed = time.perf_counter() - started
    ok = all_ok and hand_ok
    assert announce(
        "criterion 8 (distribution-layer self-tests, n=10^5, bound 0.0075)",
        ok,
        "; ".join(details) + f"; discrete hand-sum {'ok' if hand_ok else 'off'}"
        f", runtime {elapsed:.0f}s",
    )
