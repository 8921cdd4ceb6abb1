"""Sums of independent exponentials with distinct rates (hypoexponential laws).

For rates ``k_1 .. k_n`` the density of the sum is

    f(x) = sum_i w_i k_i exp(-k_i x),   w_i = prod_{h != i} k_h / (k_h - k_i)

and the mixture weights ``w_i`` sum to one.  The capacity closed forms only
need ``E[ln(X + c)]``, which follows term by term from
``int_0^inf k e^{-kx} ln(x + c) dx = ln c + e^{ck} E1(ck)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .channel import LinkTable
from .errors import ParameterError, RateCollisionError
from .special import exp_scaled_e1

DISTINCT_RTOL = 1e-9
PERTURB_STEP = 1e-7
LOG_PRODUCT_THRESHOLD = 8


class RateKind(enum.Enum):
    CCU_FULL = "ccu_full"
    CCU_INTERF = "ccu_interf"
    CEU_NUM = "ceu_num"
    CEU_DEN = "ceu_den"
    GENERIC = "generic"


class CollisionPolicy(enum.Enum):
    FAIL = "fail"
    PERTURB = "perturb"


def _collision_groups(rates: np.ndarray) -> list[list[int]]:
    order = np.argsort(rates)
    groups, current = [], [order[0]]
    for prev, idx in zip(order[:-1], order[1:]):
        a, b = rates[prev], rates[idx]
        if abs(b - a) / max(a, b) <= DISTINCT_RTOL:
            current.append(idx)
        else:
            groups.append(current)
            current = [idx]
    groups.append(current)
    return [g for g in groups if len(g) > 1]


@dataclass(frozen=True)
class RateSet:
    """Rates of the exponential terms in a hypoexponential sum."""

    rates: np.ndarray
    kind: RateKind = RateKind.GENERIC
    perturbed: bool = False

    def __post_init__(self):
        rates = np.atleast_1d(np.array(self.rates, dtype=float))
        if rates.ndim != 1 or len(rates) == 0:
            raise ParameterError("a rate set needs at least one rate")
        if not np.all(np.isfinite(rates)) or np.any(rates <= 0):
            raise ParameterError(f"rates must be finite and > 0, got {rates}")
        object.__setattr__(self, "rates", rates)
        groups = _collision_groups(rates) if len(rates) > 1 else []
        if groups and not self.perturbed:
            pairs = ", ".join(str(rates[g].tolist()) for g in groups)
            raise RateCollisionError(
                f"{self.kind.value} rates not distinct within {DISTINCT_RTOL:g}: {pairs}"
            )

    @classmethod
    def create(cls, rates, kind=RateKind.GENERIC, policy=CollisionPolicy.FAIL) -> "RateSet":
        """Build a rate set, optionally nudging coincident rates apart.

        Under ``CollisionPolicy.PERTURB`` every cluster of coincident rates is
        spread multiplicatively over ``[1 - 1e-7, 1 + 1e-7]`` and the result is
        flagged ``perturbed``.
        """
        rates = np.atleast_1d(np.array(rates, dtype=float))
        policy = CollisionPolicy(policy)
        if policy is CollisionPolicy.FAIL or len(rates) < 2 or np.any(rates <= 0):
            return cls(rates, kind)
        groups = _collision_groups(rates)
        if not groups:
            return cls(rates, kind)
        rates = rates.copy()
        for g in groups:
            base = rates[g[0]]
            rates[g] = base * (1.0 + np.linspace(-PERTURB_STEP, PERTURB_STEP, len(g)))
        return cls(rates, kind, perturbed=True)

    def __len__(self) -> int:
        return len(self.rates)

    @property
    def weights(self) -> np.ndarray:
        return mixture_weights(self.rates)

    @property
    def mean(self) -> float:
        return float(np.sum(1.0 / self.rates))


def mixture_weights(rates: np.ndarray) -> np.ndarray:
    """``w_i = prod_{h != i} k_h / (k_h - k_i)``.

    Beyond eight rates the products are accumulated as log-magnitude and sign.
    """
    rates = np.asarray(rates, dtype=float)
    n = len(rates)
    if n == 1:
        return np.ones(1)
    diff = rates[None, :] - rates[:, None]  # [i, h] = k_h - k_i
    np.fill_diagonal(diff, 1.0)
    ratio = rates[None, :] / diff
    np.fill_diagonal(ratio, 1.0)
    if n <= LOG_PRODUCT_THRESHOLD:
        return np.prod(ratio, axis=1)
    sign = np.prod(np.sign(ratio), axis=1)
    return sign * np.exp(np.sum(np.log(np.abs(ratio)), axis=1))


def rates_ccu(link_table: LinkTable, j: int, alpha: float, rho: float,
              include_own: bool = True, policy=CollisionPolicy.FAIL) -> RateSet:
    """Rates ``1 / (alpha rho lambda_ij)`` of the terms in ``alpha rho sum_i |h_ij|^2``.

    ``j`` is the 0-based CCU index.  ``include_own=False`` drops ``i = j``,
    leaving the inter-cell interference sum.
    """
    n_bs = link_table.n_bs
    if not 0 <= j < n_bs:
        raise ParameterError(f"CCU index {j} out of range for B={n_bs}")
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must be in (0, 1], got {alpha}")
    if not rho > 0:
        raise ParameterError(f"rho must be > 0, got {rho}")
    lam = link_table.sigma2_hat_ccu[:, j]
    rates = 1.0 / (alpha * rho * lam)
    if include_own:
        return RateSet.create(rates, RateKind.CCU_FULL, policy)
    return RateSet.create(np.delete(rates, j), RateKind.CCU_INTERF, policy)


def rates_ceu(link_table: LinkTable, alpha: float, rho: float, kind=RateKind.CEU_NUM,
              policy=CollisionPolicy.FAIL) -> RateSet:
    """CEU rates: ``1 / (rho lambda_ik)`` (numerator) or ``1 / (alpha rho lambda_ik)``."""
    kind = RateKind(kind)
    if kind not in (RateKind.CEU_NUM, RateKind.CEU_DEN):
        raise ParameterError(f"CEU rate kind must be CEU_NUM or CEU_DEN, got {kind}")
    if not rho > 0:
        raise ParameterError(f"rho must be > 0, got {rho}")
    scale = rho if kind is RateKind.CEU_NUM else alpha * rho
    if not scale > 0:
        raise ParameterError(f"alpha must be > 0 for CEU_DEN rates, got {alpha}")
    return RateSet.create(1.0 / (scale * link_table.sigma2_hat_ceu), kind, policy)


# Perturbed sets hold near-equal rates, so the mixture weights are huge and of
# alternating sign (about 1e-7**-(m-1) for m coincident rates) and the weighted
# sums cancel catastrophically.  Those sets go through the phase-type form
# instead: the sum is the absorption time of the chain 1 -> 2 -> .. -> n with
# generator T, and e^{Tx} is well conditioned for any spacing of the rates.


def _generator(rates: np.ndarray) -> np.ndarray:
    n = len(rates)
    T = np.diag(-rates)
    T[np.arange(n - 1), np.arange(1, n)] = rates[:-1]
    return T


def _phase_type_row(rates: np.ndarray, x: np.ndarray) -> np.ndarray:
    # first row of e^{Tx} for every x, shape x.shape + (n,)
    T = _generator(rates)
    flat = np.array([linalg.expm(T * xi)[0] for xi in x.ravel()])
    return flat.reshape(x.shape + (len(rates),))


def pdf(rs: RateSet, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("hypoexponential pdf needs x >= 0")
    if rs.perturbed:
        out = np.maximum(_phase_type_row(rs.rates, x)[..., -1] * rs.rates[-1], 0.0)
        return float(out) if out.ndim == 0 else out
    k, w = rs.rates, rs.weights
    terms = w * k * np.exp(-np.multiply.outer(x, k))
    out = np.maximum(terms.sum(axis=-1), 0.0)
    return float(out) if out.ndim == 0 else out


def cdf(rs: RateSet, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("hypoexponential cdf needs x >= 0")
    if rs.perturbed:
        out = np.clip(1.0 - _phase_type_row(rs.rates, x).sum(axis=-1), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out
    k, w = rs.rates, rs.weights
    # 1 - sum_i w_i e^{-k_i x}, written via expm1 so F(0) is ~0 rather than 1 - 1
    terms = -w * np.expm1(-np.multiply.outer(x, k))
    out = np.clip(terms.sum(axis=-1), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def expected_log(rs: RateSet, offset: float) -> float:
    """``E[ln(X + offset)]`` for ``X`` with rate set ``rs`` (natural log)."""
    if not offset > 0:
        raise ParameterError(f"offset must be > 0, got {offset}")
    if rs.perturbed:
        return _expected_log_phase_type(rs.rates, offset)
    k, w = rs.rates, rs.weights
    return math.log(offset) + float(np.dot(w, exp_scaled_e1(offset * k)))


def _expected_log_phase_type(rates: np.ndarray, offset: float) -> float:
    # E ln(X + c) = ln c + int_0^inf S(x) / (x + c) dx, S the survival function
    T = _generator(rates)

    def integrand(x):
        return linalg.expm(T * x)[0].sum() / (x + offset)

    edges = sorted({0.0, *(1.0 / rates), *(10.0 / rates), 50.0 * float(np.sum(1.0 / rates))})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(integrand, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
    return math.log(offset) + total


def sample(rs: RateSet, size: int, generator: np.random.Generator) -> np.ndarray:
    """Sums of independent exponential draws (for empirical checks)."""
    return generator.exponential(1.0 / rs.rates, size=(size, len(rs))).sum(axis=1)
