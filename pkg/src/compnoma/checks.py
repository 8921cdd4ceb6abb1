"""Numerical self-checks of the hypoexponential density.

Each check compares :mod:`compnoma.hypoexp` against an independent route:
adaptive quadrature, a convolution computed without the closed form, or
sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from . import hypoexp
from .hypoexp import RateSet


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3e} (limit {self.threshold:.1e})"


def _x_max(rs: RateSet) -> float:
    return 40.0 / float(np.min(rs.rates))


def _quad(fn, rs: RateSet) -> float:
    # split at a few characteristic scales so narrow peaks near 0 are resolved
    edges = sorted({0.0, *(1.0 / rs.rates), *(10.0 / rs.rates), _x_max(rs)})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(fn, lo, hi, limit=200, epsabs=1e-14, epsrel=1e-13)
        total += val
    return total


def normalization_error(rs: RateSet) -> float:
    """``|int_0^xmax pdf - 1|`` with ``xmax = 40 / min(rate)``."""
    return abs(_quad(lambda x: hypoexp.pdf(rs, x), rs) - 1.0)


def mean_relative_error(rs: RateSet) -> float:
    """Relative gap between ``int x pdf`` and ``sum 1/k``."""
    mean = _quad(lambda x: x * hypoexp.pdf(rs, x), rs)
    return abs(mean - rs.mean) / rs.mean


def convolution_density_quad(rates, x: float) -> float:
    """Density of the sum at ``x`` by nested quadrature of the convolution integral.

    Practical for up to three rates.
    """
    rates = list(rates)
    k = rates[-1]
    if len(rates) == 1:
        return k * np.exp(-k * x)
    inner = rates[:-1]

    def integrand(t):
        return convolution_density_quad(inner, t) * k * np.exp(-k * (x - t))

    val, _ = integrate.quad(integrand, 0.0, x, limit=200, epsabs=1e-14, epsrel=1e-12)
    return val


def convolution_density_ode(rates, xs) -> np.ndarray:
    """Density of the sum on a grid by integrating the convolution chain.

    With ``g_1 = k_1 e^{-k_1 x}`` and ``g_m = g_{m-1} * (k_m e^{-k_m x})``,
    differentiating the convolution integral gives the linear system
    ``g_1' = -k_1 g_1``, ``g_m' = k_m (g_{m-1} - g_m)``, ``g_m(0) = 0``.
    """
    k = np.asarray(rates, dtype=float)
    n = len(k)
    xs = np.asarray(xs, dtype=float)
    A = np.diag(-k)
    for m in range(1, n):
        A[m, m - 1] = k[m]
    y0 = np.zeros(n)
    y0[0] = k[0]
    if xs[-1] == 0.0:
        return np.full(len(xs), y0[-1])
    sol = integrate.solve_ivp(
        lambda _, y: A @ y, (0.0, xs[-1]), y0, t_eval=xs, method="DOP853",
        rtol=1e-12, atol=1e-14,
    )
    if not sol.success:
        raise ArithmeticError(sol.message)
    return sol.y[-1]


def convolution_error(rs: RateSet, n_points: int = 41, method: str = "auto") -> float:
    """Max absolute gap between ``pdf`` and a convolution oracle on a grid."""
    xs = np.linspace(0.0, 10.0 * float(np.sum(1.0 / rs.rates)), n_points)
    if method == "auto":
        method = "quad" if len(rs) <= 2 else "ode"
    if method == "quad":
        ref = np.array([convolution_density_quad(rs.rates, x) for x in xs])
    else:
        ref = convolution_density_ode(rs.rates, xs)
    return float(np.max(np.abs(hypoexp.pdf(rs, xs) - ref)))


def ks_pvalue(rs: RateSet, samples: int, seed: int) -> tuple[float, float]:
    """KS statistic and p-value of sampled sums against :func:`hypoexp.cdf`."""
    draws = hypoexp.sample(rs, samples, np.random.default_rng(seed))
    res = stats.kstest(draws, lambda x: hypoexp.cdf(rs, x))
    return float(res.statistic), float(res.pvalue)


def ks_critical(samples: int, level: float = 0.01) -> float:
    """Critical KS statistic at the given level (asymptotic Kolmogorov law)."""
    return float(stats.kstwobign.isf(level) / np.sqrt(samples))


def run_rate_set_checks(label: str, rs: RateSet, ks_samples: int = 100_000, seed: int = 0,
                        tol: float = 1e-6, level: float = 0.01) -> list[CheckResult]:
    norm = normalization_error(rs)
    conv = convolution_error(rs)
    mean = mean_relative_error(rs)
    stat, _ = ks_pvalue(rs, ks_samples, seed)
    crit = ks_critical(ks_samples, level)
    return [
        CheckResult(f"{label} normalization", norm, tol, norm <= tol),
        CheckResult(f"{label} convolution oracle", conv, tol, conv <= tol),
        CheckResult(f"{label} mean identity (rel)", mean, tol, mean <= tol),
        CheckResult(f"{label} KS statistic", stat, crit, stat < crit),
    ]
