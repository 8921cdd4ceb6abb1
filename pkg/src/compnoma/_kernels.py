"""Per-sample capacity kernels: numba loop and vectorized numpy fallback.

Both fill a ``(4B + 2, n)`` array of ``log2(1 + SINR)`` values for samples
``start .. start + n - 1``, one row per quantity (``B`` base stations):

    [0, B)          NOMA Case I, CCU-j
    [B, 2B)         NOMA Case II, CCU-j
    2B              NOMA CEU
    [2B+1, 3B+1)    OMA CCU-j   (already scaled by 1/(B+1))
    3B+1            OMA CEU     (already scaled by 1/(B+1))
    [3B+2, 4B+2)    SIC stage: CEU signal decoded at CCU-j (diagnostic)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng, sinr
from ._accel import HAVE_NUMBA, use_numba
from .channel import LinkTable, sample_batch
from .params import SystemParams

LN2 = math.log(2.0)


def n_rows(n_bs: int) -> int:
    return 4 * n_bs + 2


@dataclass(frozen=True)
class KernelInputs:
    """Flat per-scenario constants handed to the kernels."""

    lam_ccu: np.ndarray
    lam_ceu: np.ndarray
    floor_ccu: np.ndarray
    floor_sic: np.ndarray
    floor_ceu: float
    floor_oma_ccu: np.ndarray
    floor_oma_ceu: float
    alpha: float
    beta: float
    p_oma_ccu: float
    p_oma_ceu: float

    @classmethod
    def build(cls, params: SystemParams, link_table: LinkTable) -> "KernelInputs":
        inv_rho = 1.0 / params.rho
        eps_ccu = link_table.sigma2_eps_ccu
        eps_ceu_sum = float(np.sum(link_table.sigma2_eps_ceu))
        p_ccu, p_ceu = params.oma_powers()
        return cls(
            lam_ccu=np.ascontiguousarray(link_table.sigma2_hat_ccu, dtype=np.float64),
            lam_ceu=np.ascontiguousarray(link_table.sigma2_hat_ceu, dtype=np.float64),
            floor_ccu=eps_ccu.sum(axis=0) + params.upsilon + inv_rho,
            floor_sic=eps_ccu.sum(axis=0) + inv_rho,
            floor_ceu=eps_ceu_sum + inv_rho,
            floor_oma_ccu=np.diag(eps_ccu) + inv_rho,
            floor_oma_ceu=eps_ceu_sum + inv_rho,
            alpha=float(params.alpha),
            beta=float(params.beta),
            p_oma_ccu=float(p_ccu),
            p_oma_ceu=float(p_ceu),
        )


def capacity_samples_numpy(params: SystemParams, link_table: LinkTable, seed: int,
                           start: int, count: int) -> np.ndarray:
    n_bs = link_table.n_bs
    draw = sample_batch(link_table, seed, start, count)
    out = np.empty((n_rows(n_bs), count))
    slot = 1.0 / (n_bs + 1)
    for j in range(n_bs):
        out[j] = np.log1p(sinr.sinr_ccu_case1(draw, params, link_table, j)) / LN2
        out[n_bs + j] = np.log1p(sinr.sinr_ccu_case2(draw, params, link_table, j)) / LN2
        out[2 * n_bs + 1 + j] = slot * (
            np.log1p(sinr.sinr_oma_ccu(draw, params, link_table, j)) / LN2
        )
        out[3 * n_bs + 2 + j] = np.log1p(sinr.sinr_ccu_decode_ceu(draw, params, link_table, j)) / LN2
    out[2 * n_bs] = np.log1p(sinr.sinr_ceu(draw, params, link_table)) / LN2
    out[3 * n_bs + 1] = slot * (np.log1p(sinr.sinr_oma_ceu(draw, params, link_table)) / LN2)
    return out


if HAVE_NUMBA:
    import numba

    @numba.njit(cache=True, nogil=True, error_model="numpy")
    def _capacity_samples_nb(key, start, count, lam_ccu, lam_ceu, floor_ccu, floor_sic,
                             floor_ceu, floor_oma_ccu, floor_oma_ceu, alpha, beta,
                             p_oma_ccu, p_oma_ceu, out):
        n_bs = lam_ceu.shape[0]
        n_ccu_links = n_bs * n_bs
        slot = 1.0 / (n_bs + 1)
        g = np.empty((n_bs, n_bs))
        for s in range(count):
            idx = start + s
            for i in range(n_bs):
                for j in range(n_bs):
                    g[i, j] = rng.exponential_nb(key, idx, i * n_bs + j, lam_ccu[i, j])
            for j in range(n_bs):
                own = g[j, j]
                cross = 0.0
                total = 0.0
                for i in range(n_bs):
                    total += g[i, j]
                    if i != j:
                        cross += g[i, j]
                z1 = alpha * own / (alpha * cross + floor_ccu[j])
                z2 = alpha * own / floor_ccu[j]
                zo = p_oma_ccu * own / floor_oma_ccu[j]
                zs = beta * total / (alpha * total + floor_sic[j])
                out[j, s] = np.log1p(z1) / LN2
                out[n_bs + j, s] = np.log1p(z2) / LN2
                out[2 * n_bs + 1 + j, s] = slot * (np.log1p(zo) / LN2)
                out[3 * n_bs + 2 + j, s] = np.log1p(zs) / LN2
            total_ceu = 0.0
            for i in range(n_bs):
                total_ceu += rng.exponential_nb(key, idx, n_ccu_links + i, lam_ceu[i])
            zk = beta * total_ceu / (alpha * total_ceu + floor_ceu)
            zko = p_oma_ceu * total_ceu / floor_oma_ceu
            out[2 * n_bs, s] = np.log1p(zk) / LN2
            out[3 * n_bs + 1, s] = slot * (np.log1p(zko) / LN2)
        return out


def capacity_samples_numba(params: SystemParams, link_table: LinkTable, seed: int,
                           start: int, count: int, inputs: KernelInputs | None = None) -> np.ndarray:
    if not HAVE_NUMBA:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    k = inputs or KernelInputs.build(params, link_table)
    out = np.empty((n_rows(link_table.n_bs), count))
    return _capacity_samples_nb(
        rng.seed_key(seed), start, count, k.lam_ccu, k.lam_ceu, k.floor_ccu, k.floor_sic,
        k.floor_ceu, k.floor_oma_ccu, k.floor_oma_ceu, k.alpha, k.beta, k.p_oma_ccu,
        k.p_oma_ceu, out,
    )


def capacity_samples(params: SystemParams, link_table: LinkTable, seed: int, start: int,
                     count: int, backend: str | None = None,
                     inputs: KernelInputs | None = None) -> np.ndarray:
    """Dispatch to the numba or numpy kernel (``backend`` overrides the env flag)."""
    backend = backend or ("numba" if use_numba() else "numpy")
    if backend == "numba":
        return capacity_samples_numba(params, link_table, seed, start, count, inputs)
    if backend == "numpy":
        return capacity_samples_numpy(params, link_table, seed, start, count)
    raise ValueError(f"unknown backend {backend!r}")
