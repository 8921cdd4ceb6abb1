import numpy as np
import pytest

from compnoma.channel import FadingDraw, LinkTable
from compnoma.params import SystemParams
from compnoma.sinr import (
    sinr_ccu_case1,
    sinr_ccu_case2,
    sinr_ccu_decode_ceu,
    sinr_ceu,
    sinr_oma_ccu,
    sinr_oma_ceu,
)


def zero_error_table(B=2):
    lam = np.ones((B, B))
    return LinkTable(lam, np.zeros((B, B)), np.ones(B), np.zeros(B), 4.0)


def draw(g_ccu, g_ceu):
    return FadingDraw(np.asarray(g_ccu, float), np.asarray(g_ceu, float))


def test_zero_gains():
    p = SystemParams()
    lt = zero_error_table()
    d = draw(np.zeros((2, 2)), np.zeros(2))
    assert sinr_ccu_case1(d, p, lt, 0) == 0
    assert sinr_ceu(d, p, lt) == 0
    assert sinr_oma_ccu(d, p, lt, 1) == 0


def test_ccu_substitution():
    p = SystemParams(alpha=0.05, beta=0.95, rho=100.0, upsilon=0.0)
    d = draw([[1.0, 0.0], [0.0, 0.0]], [0.0, 0.0])
    assert sinr_ccu_case1(d, p, zero_error_table(), 0) == pytest.approx(5.0, rel=1e-15)


def test_case2_mask_dominates():
    p = SystemParams(sigma2_eps=0.0)
    rng = np.random.default_rng(1)
    lt = zero_error_table(3)
    g = rng.exponential(size=(1000, 3, 3))
    d = draw(g, rng.exponential(size=(1000, 3)))
    for j in range(3):
        assert np.all(sinr_ccu_case2(d, p, lt, j) >= sinr_ccu_case1(d, p, lt, j))


def test_cross_terms_exclude_own_link():
    p = SystemParams(upsilon=0.0)
    lt = zero_error_table(3)
    g = np.array([[2.0, 0.3, 0.1], [0.7, 5.0, 0.2], [0.4, 0.6, 1.0]])
    z = sinr_ccu_case1(draw(g, np.ones(3)), p, lt, 1)
    expected = p.alpha * 5.0 / (p.alpha * (0.3 + 0.6) + 1 / p.rho)
    assert z == pytest.approx(expected, rel=1e-15)


def test_decode_ceu_ratio_limit():
    p = SystemParams(rho=1e15)
    z = sinr_ccu_decode_ceu(draw(np.ones((2, 2)), np.ones(2)), p, zero_error_table(), 0)
    assert z == pytest.approx(p.beta / p.alpha, rel=1e-10)


def test_ceu_bound_pointwise():
    p = SystemParams(rho=1e6)
    rng = np.random.default_rng(2)
    g = rng.exponential(scale=100.0, size=(10000, 2))
    z = sinr_ceu(draw(np.ones((10000, 2, 2)), g), p, zero_error_table())
    assert np.all(z < p.beta / p.alpha)


def test_ceu_perfect_csi_form():
    p = SystemParams(alpha=0.2, beta=0.8, rho=50.0)
    g = np.array([0.3, 1.7])
    z = sinr_ceu(draw(np.ones((2, 2)), g), p, zero_error_table())
    total = g.sum()
    assert z == pytest.approx(p.beta * p.rho * total / (p.alpha * p.rho * total + 1), rel=1e-15)


def test_error_variance_enters_floor():
    p = SystemParams(upsilon=0.0, rho=100.0)
    lt = LinkTable(np.ones((2, 2)), np.full((2, 2), 0.01), np.ones(2), np.full(2, 0.01), 4.0)
    d = draw([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
    assert sinr_ccu_case1(d, p, lt, 0) == pytest.approx(0.05 / (0.02 + 0.01), rel=1e-14)
    assert sinr_oma_ccu(d, p, lt, 0) == pytest.approx(0.05 / (0.01 + 0.01), rel=1e-14)
    assert sinr_oma_ceu(d, p, lt) == pytest.approx(0.95 * 2 / (0.02 + 0.01), rel=1e-14)


def test_broadcast_shapes():
    p = SystemParams()
    lt = zero_error_table(3)
    d = draw(np.ones((4, 5, 3, 3)), np.ones((4, 5, 3)))
    assert sinr_ccu_case1(d, p, lt, 2).shape == (4, 5)
    assert sinr_ceu(d, p, lt).shape == (4, 5)
