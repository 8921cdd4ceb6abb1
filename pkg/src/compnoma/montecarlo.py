"""Monte Carlo estimates of the ergodic capacities.

Samples are split into fixed-size chunks.  Each chunk produces a count, mean
and centered sum of squares per target; chunk statistics are then merged in a
fixed pairwise tree.  Chunk boundaries depend only on ``McConfig.chunk``, so
the result is bit-identical for any number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernels import KernelInputs, capacity_samples
from .channel import LinkTable, sample_batch
from .errors import ParameterError
from .params import Case, Scheme, SystemParams
from .sinr import (  # noqa: F401  re-exported
    sinr_ccu_case1,
    sinr_ccu_case2,
    sinr_ccu_decode_ceu,
    sinr_ceu,
    sinr_oma_ccu,
    sinr_oma_ceu,
)

DEFAULT_SAMPLES = 1_000_000
DEFAULT_CHUNK = 1 << 16
MIN_SAMPLES = 1_000
SEED_ENV = "COMPNOMA_SEED"
DEFAULT_SEED = 20200101


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


@dataclass(frozen=True)
class McConfig:
    samples: int = DEFAULT_SAMPLES
    seed: int = field(default_factory=default_seed)
    chunk: int = DEFAULT_CHUNK
    workers: int = 1
    backend: str | None = None

    def __post_init__(self):
        if self.samples < MIN_SAMPLES:
            raise ParameterError(f"samples must be >= {MIN_SAMPLES}, got {self.samples}")
        if self.chunk < 1:
            raise ParameterError("chunk must be >= 1")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")

    def chunks(self) -> list[tuple[int, int]]:
        return [(s, min(self.chunk, self.samples - s)) for s in range(0, self.samples, self.chunk)]


@dataclass(frozen=True)
class CapacityEstimate:
    mean: float
    stderr: float
    samples: int
    method: str

    @classmethod
    def analytic(cls, value: float) -> "CapacityEstimate":
        return cls(float(value), 0.0, 0, "analytic")


def target_keys(n_bs: int) -> list[tuple[str, str | None, str]]:
    """Keys ``(scheme, case, user)`` produced by :func:`estimate_all`, in order."""
    keys = []
    for case in ("I", "II"):
        keys += [("NOMA", case, f"CCU-{j + 1}") for j in range(n_bs)]
        keys += [("NOMA", case, "CEU"), ("NOMA", case, "SUM"), ("NOMA", case, "CCU-SUM")]
    keys += [("OMA", None, f"CCU-{j + 1}") for j in range(n_bs)]
    keys += [("OMA", None, "CEU"), ("OMA", None, "SUM"), ("OMA", None, "CCU-SUM")]
    keys += [("NOMA", None, f"SIC-{j + 1}") for j in range(n_bs)]
    return keys


def _target_rows(n_bs: int) -> list[list[int]]:
    """Kernel rows summed into each target of :func:`target_keys`."""
    B = n_bs
    ceu = 2 * B
    groups = []
    for first in (0, B):
        ccu = list(range(first, first + B))
        groups += [[c] for c in ccu] + [[ceu], ccu + [ceu], ccu]
    oma_ccu = list(range(2 * B + 1, 3 * B + 1))
    oma_ceu = 3 * B + 1
    groups += [[c] for c in oma_ccu] + [[oma_ceu], oma_ccu + [oma_ceu], oma_ccu]
    groups += [[3 * B + 2 + j] for j in range(B)]
    return groups


def _chunk_stats(values: np.ndarray, groups: list[list[int]]):
    count = values.shape[1]
    mean = np.empty(len(groups))
    m2 = np.empty(len(groups))
    for q, rows in enumerate(groups):
        row = values[rows[0]] if len(rows) == 1 else values[rows].sum(axis=0)
        mean[q] = row.sum() / count
        m2[q] = np.sum(np.square(row - mean[q]))
    return count, mean, m2


def _merge(a, b):
    na, ma, m2a = a
    nb, mb, m2b = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), m2a + m2b + delta**2 * (na * nb / n)


def _pairwise(stats):
    if len(stats) == 1:
        return stats[0]
    mid = len(stats) // 2
    return _merge(_pairwise(stats[:mid]), _pairwise(stats[mid:]))


def estimate_all(params: SystemParams, link_table: LinkTable,
                 mc: McConfig | None = None) -> dict[tuple[str, str | None, str], CapacityEstimate]:
    """Estimate every target from one shared set of fading draws.

    ``params.case`` and ``params.scheme`` are ignored; all combinations are
    returned, keyed as in :func:`target_keys`.
    """
    mc = mc or McConfig()
    n_bs = link_table.n_bs
    groups = _target_rows(n_bs)
    inputs = KernelInputs.build(params, link_table)

    def run(chunk):
        start, count = chunk
        values = capacity_samples(params, link_table, mc.seed, start, count, mc.backend, inputs)
        return _chunk_stats(values, groups)

    chunks = mc.chunks()
    if mc.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            stats = list(pool.map(run, chunks))
    else:
        stats = [run(c) for c in chunks]
    n, mean, m2 = _pairwise(stats)
    stderr = np.sqrt(m2 / (n - 1) / n)
    return {
        key: CapacityEstimate(float(mean[q]), float(stderr[q]), int(n), "monte-carlo")
        for q, key in enumerate(target_keys(n_bs))
    }


def target_key(params: SystemParams, user: str) -> tuple[str, str | None, str]:
    scheme = params.scheme.value
    case = params.case.value if params.scheme is Scheme.COMP_NOMA else None
    if user.startswith("SIC-"):
        return "NOMA", None, user
    return scheme, case, user


def estimate(params: SystemParams, link_table: LinkTable, target: str,
             mc: McConfig | None = None) -> CapacityEstimate:
    """Monte Carlo estimate of one target (``CCU-j``, ``CEU``, ``SUM``, ``CCU-SUM``).

    Scheme and case come from ``params``.  ``SIC-j`` selects the diagnostic
    rate of decoding the CEU signal at CCU-j.
    """
    results = estimate_all(params, link_table, mc)
    key = target_key(params, target)
    try:
        return results[key]
    except KeyError:
        raise ParameterError(f"unknown target {target!r} for B={link_table.n_bs}") from None


def ceu_bound_check(params: SystemParams, link_table: LinkTable, samples: int, seed: int,
                    chunk: int = DEFAULT_CHUNK) -> tuple[int, float]:
    """Count sampled CEU SINRs reaching ``beta / alpha``; also return the max ratio."""
    bound = params.beta / params.alpha
    violations = 0
    worst = 0.0
    for start in range(0, samples, chunk):
        count = min(chunk, samples - start)
        z = sinr_ceu(sample_batch(link_table, seed, start, count), params, link_table)
        violations += int(np.count_nonzero(z >= bound))
        worst = max(worst, float(z.max()) / bound)
    return violations, worst


__all__ = [
    "Case",
    "CapacityEstimate",
    "McConfig",
    "ceu_bound_check",
    "estimate",
    "estimate_all",
    "target_keys",
]
