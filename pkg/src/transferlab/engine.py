"""Deterministic, parallelizable Monte Carlo replication.

Each replicate owns a private random stream derived from (master_seed,
stream_id) by a fixed avalanche-mixing function, so the result of a plan is
byte-identical across runs and across any worker count: scheduling can only
change *when* a replicate runs, never *what* it computes. Results are
gathered into a buffer indexed by replicate id; the only cross-replicate
operation is one final sort inside the empirical law.

The environment variable ``TRANSFERLAB_WORKERS`` caps the worker count;
the default is the available CPU parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import EmpiricalDistribution

WORKERS_ENV_VAR = "TRANSFERLAB_WORKERS"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _avalanche(z: int) -> int:
    """One round of 64-bit avalanche mixing (xor-shift-multiply finalizer)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(master_seed: int, stream_id: int) -> tuple[int, int]:
    """Mix (master_seed, stream_id) into a 128-bit counter-based generator key.

    Two rounds of the avalanche hash per word, with distinct additive
    constants per word, give an injective-in-practice derivation: any change
    in either input flips about half the key bits.
    """
    a = _avalanche((master_seed + _GOLDEN) & _MASK64)
    b = _avalanche((stream_id + 3 * _GOLDEN) & _MASK64)
    w0 = _avalanche((a ^ (b + _GOLDEN)) & _MASK64)
    w1 = _avalanche((b ^ (a + 2 * _GOLDEN)) & _MASK64)
    return w0, w1


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus stream id; one stream per replicate or phase."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if not 0 <= self.stream_id <= _MASK64:
            raise ValueError("stream_id must fit in 64 unsigned bits")

    def stream(self, offset: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, (self.stream_id + offset) & _MASK64)

    def generator(self) -> np.random.Generator:
        w0, w1 = derive_key(self.master_seed, self.stream_id)
        key = np.array([w0, w1], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ReplicationPlan:
    """How many replicates to run and where their streams start."""

    replicates: int
    seed: SeedSpec
    chunk_size: int = 256

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")


class ReplicateError(RuntimeError):
    """A task failed; carries the replicate index that raised."""

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"replicate {index} failed: {cause!r}")
        self.index = index


def worker_count() -> int:
    """Worker cap from TRANSFERLAB_WORKERS, defaulting to CPU parallelism."""
    raw = os.environ.get(WORKERS_ENV_VAR)
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ValueError(f"{WORKERS_ENV_VAR}={raw!r} is not an integer") from exc
        if cap < 1:
            raise ValueError(f"{WORKERS_ENV_VAR} must be >= 1, got {cap}")
        return cap
    return os.cpu_count() or 1


def run_replicated_array(
    plan: ReplicationPlan, task: Callable[[np.random.Generator], float | tuple]
) -> np.ndarray:
    """Run one task per replicate; rows are in replicate-index order.

    ``task`` must be a pure function of its generator (replicate i always
    receives the stream ``plan.seed.stream(i)``). Returns an (R, k) array for
    tasks returning k-tuples, (R, 1) for scalars.
    """

    def run_chunk(start: int, stop: int) -> np.ndarray:
        rows = []
        for i in range(start, stop):
            rng = plan.seed.stream(i).generator()
            try:
                value = task(rng)
            except Exception as exc:
                raise ReplicateError(i, exc) from exc
            rows.append(value if isinstance(value, tuple) else (value,))
        return np.asarray(rows, dtype=float)

    bounds = list(range(0, plan.replicates, plan.chunk_size)) + [plan.replicates]
    spans = list(zip(bounds[:-1], bounds[1:]))
    workers = min(worker_count(), len(spans))
    if workers <= 1:
        chunks = [run_chunk(lo, hi) for lo, hi in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_chunk, lo, hi) for lo, hi in spans]
            chunks = [f.result() for f in futures]
    return np.concatenate(chunks, axis=0)


def run_replicated(
    plan: ReplicationPlan, task: Callable[[np.random.Generator], float]
) -> EmpiricalDistribution:
    """Replicate a scalar task and collect the results into an empirical law."""
    values = run_replicated_array(plan, task)
    if values.shape[1] != 1:
        raise ValueError("task returned a tuple; use run_replicated_array")
    return EmpiricalDistribution(values[:, 0])
