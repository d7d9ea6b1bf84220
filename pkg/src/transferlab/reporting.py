"""Report and CSV emission.

Every run writes one ``report.json`` (top-level keys: config, seed, checks,
runtime_seconds) plus one CSV per CDF comparison with columns
``x, F_empirical, F_target, abs_diff`` in ``%.12g`` formatting. Apart from
``runtime_seconds`` the outputs are byte-identical functions of the config
and seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .gof import GofReport

# CSVs with more rows than this are deterministically thinned (evenly spaced
# rows plus the largest-deviation row), keeping files plottable.
_CSV_MAX_ROWS = 20_001


def check_entry(report: GofReport) -> dict:
    return {
        "name": report.name,
        "statistic": report.statistic,
        "critical": report.critical,
        "pass": report.passed,
        "alpha": report.alpha,
        "n": report.n,
    }


def write_report(
    out_dir: str | Path,
    config: dict,
    seed: int,
    checks: list[GofReport],
    runtime_seconds: float,
) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "config": config,
        "seed": seed,
        "checks": [check_entry(c) for c in checks],
        "runtime_seconds": runtime_seconds,
    }
    path = out / "report.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def write_ecdf_csv(
    path: str | Path,
    x: np.ndarray,
    f_empirical: np.ndarray,
    f_target: np.ndarray,
) -> Path:
    x = np.asarray(x, dtype=float)
    f_empirical = np.asarray(f_empirical, dtype=float)
    f_target = np.asarray(f_target, dtype=float)
    diff = np.abs(f_empirical - f_target)
    if x.size > _CSV_MAX_ROWS:
        keep = np.unique(
            np.concatenate(
                [
                    np.linspace(0, x.size - 1, _CSV_MAX_ROWS).astype(np.int64),
                    [int(np.argmax(diff))],
                ]
            )
        )
        x, f_empirical, f_target, diff = (
            x[keep],
            f_empirical[keep],
            f_target[keep],
            diff[keep],
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("x,F_empirical,F_target,abs_diff\n")
        for row in zip(x, f_empirical, f_target, diff):
            fh.write(",".join("%.12g" % v for v in row) + "\n")
    return path


def load_report(out_dir: str | Path) -> dict:
    with open(Path(out_dir) / "report.json") as fh:
        return json.load(fh)
