"""Exponential integral E1 and its exponentially scaled form.

``Ei(-x) = -E1(x)`` for ``x > 0``, so every ``exp(c) * Ei(-c)`` product in the
capacity closed forms is ``-exp_scaled_e1(c)``.

For ``x <= 1`` the power series

    E1(x) = -gamma - ln x + sum_{n>=1} (-1)**(n+1) x**n / (n * n!)

is summed directly.  For ``x > 1`` the continued fraction

    E1(x) = exp(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))

is evaluated with the modified Lentz algorithm; it yields ``exp(x) * E1(x)``
without ever forming ``exp(x)``.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000
BRANCH_POINT = 1.0


def _check_domain(x: float) -> None:
    if not x > 0:
        raise ValueError(f"exponential integral E1 needs x > 0, got {x!r}")


def _e1_series(x: float) -> float:
    total = 0.0
    term = 1.0
    for n in range(1, _MAX_ITER):
        term *= -x / n
        contrib = -term / n
        total += contrib
        if abs(contrib) < _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(x) + total


def _scaled_e1_cf(x: float) -> float:
    # modified Lentz; returns exp(x) * E1(x)
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x}")


def _e1_scalar(x: float) -> float:
    x = float(x)
    _check_domain(x)
    if x <= BRANCH_POINT:
        return _e1_series(x)
    return math.exp(-x) * _scaled_e1_cf(x)


def _exp_scaled_e1_scalar(x: float) -> float:
    x = float(x)
    _check_domain(x)
    if x <= BRANCH_POINT:
        return math.exp(x) * _e1_series(x)
    return _scaled_e1_cf(x)


def _elementwise(scalar_fn):
    vec = np.vectorize(scalar_fn, otypes=[float])

    def wrapper(x):
        if np.ndim(x) == 0:
            return scalar_fn(x)
        return vec(x)

    return wrapper


def e1(x):
    """E1(x) for x > 0 (scalar or array)."""
    return _e1(x)


def exp_scaled_e1(x):
    """exp(x) * E1(x) for x > 0, finite even where exp(x) overflows."""
    return _exp_scaled(x)


_e1 = _elementwise(_e1_scalar)
_exp_scaled = _elementwise(_exp_scaled_e1_scalar)


def ei_negative(x):
    """Ei(-x) for x > 0."""
    return -e1(x)
