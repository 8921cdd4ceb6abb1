import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from compnoma import analytic
from compnoma.channel import LinkTable
from compnoma.errors import ParameterError, RateCollisionError
from compnoma.experiments import default_params, link_table_for
from compnoma.geometry import CellLayout, preset_b2, preset_b3
from compnoma.hypoexp import CollisionPolicy
from compnoma.params import Case, OmaPower, Scheme, SystemParams

LN2 = math.log(2)


def table(lam_ccu, lam_ceu, eps=0.0):
    lam_ccu, lam_ceu = np.asarray(lam_ccu, float), np.asarray(lam_ceu, float)
    return LinkTable(lam_ccu, np.full_like(lam_ccu, eps), lam_ceu, np.full_like(lam_ceu, eps), 4.0)


def test_a_const():
    p = default_params()
    lt = link_table_for(preset_b2(), p.with_(sigma2_eps=0.01))
    assert analytic.a_const(p.with_(sigma2_eps=0.01), lt, 0) == pytest.approx(
        100 * 0.02 + 100 * 10**-2.5 + 1, rel=1e-14)
    assert analytic.a_const(p.with_(sigma2_eps=0.01), lt, 0) == pytest.approx(3.31623, abs=1e-5)
    lt0 = link_table_for(preset_b2(), p)
    assert analytic.a_const(p.with_(upsilon=0.0), lt0, 1) == 1.0
    a1 = analytic.a_const(p.with_(sigma2_eps=0.01), lt, 0)
    a2 = analytic.a_const(p.with_(sigma2_eps=0.01, rho=200.0), lt, 0)
    assert a2 - 1 == pytest.approx(2 * (a1 - 1), rel=1e-14)


def test_case2_closed_form():
    # sigma2_eps = 0, upsilon = 0, rho = 100, alpha * lambda = 0.02 gives n = 0.5
    p = SystemParams(alpha=0.05, beta=0.95, rho=100.0, upsilon=0.0, case=Case.CASE_II)
    lt = table([[0.4, 0.1], [0.1, 0.4]], [0.3, 0.2])
    assert analytic.ccu_n_param(p, lt, 0) == pytest.approx(0.5, rel=1e-14)
    expected = float(mpmath.exp(0.5) * mpmath.e1(0.5) / mpmath.log(2))
    assert analytic.ccu_capacity_case2(p, lt, 0) == pytest.approx(expected, rel=1e-13)
    assert analytic.ccu_capacity_case2(p, lt, 0) == pytest.approx(1.33148, abs=1e-5)


def _dblquad_expect_log2(fn, m1, m2):
    # E[fn(g1, g2)] for independent exponentials with means m1, m2
    def integrand(y, x):
        return fn(x, y) * math.exp(-x / m1 - y / m2) / (m1 * m2)
    val, _ = integrate.dblquad(integrand, 0, 60 * m1, 0, 60 * m2, epsabs=1e-11, epsrel=1e-11)
    return val


def test_case1_b2_against_double_integral():
    p = default_params().with_(sigma2_eps=0.01)
    lt = link_table_for(preset_b2(), p)
    lam = lt.sigma2_hat_ccu
    floor = lt.sigma2_eps_ccu[:, 0].sum() + p.upsilon + 1 / p.rho
    ref = _dblquad_expect_log2(
        lambda own, cross: math.log2(1 + p.alpha * own / (p.alpha * cross + floor)),
        lam[0, 0], lam[1, 0])
    assert analytic.ccu_capacity_case1(p, lt, 0) == pytest.approx(ref, rel=1e-7)


def test_ceu_b2_against_double_integral():
    p = default_params().with_(sigma2_eps=0.001)
    lt = link_table_for(preset_b2(), p)
    lam = lt.sigma2_hat_ceu
    floor = lt.sigma2_eps_ceu.sum() + 1 / p.rho
    ref = _dblquad_expect_log2(
        lambda g1, g2: math.log2(1 + p.beta * (g1 + g2) / (p.alpha * (g1 + g2) + floor)),
        lam[0], lam[1])
    assert analytic.ceu_capacity(p, lt) == pytest.approx(ref, rel=1e-7)


def test_oma_b2_formula(lt_b2):
    p = default_params().with_(scheme=Scheme.COMP_OMA, oma_power=OmaPower.FULL)
    n = 1 / (p.rho * lt_b2.sigma2_ccu[0, 0])
    expected = float(mpmath.exp(n) * mpmath.e1(n)) / LN2 / 3
    assert analytic.oma_ccu_capacity(p, lt_b2, 0) == pytest.approx(expected, rel=1e-12)


def test_oma_split_uses_alpha(lt_b2):
    p = default_params().with_(scheme=Scheme.COMP_OMA)
    n = 1 / (p.rho * p.alpha * lt_b2.sigma2_ccu[0, 0])
    assert analytic.oma_ccu_capacity(p, lt_b2, 0) == pytest.approx(
        float(mpmath.exp(n) * mpmath.e1(n)) / LN2 / 3, rel=1e-12)


def test_alpha_zero_limit(lt_b2):
    p = SystemParams(alpha=0.0, beta=1.0)
    assert analytic.ccu_capacity_case1(p, lt_b2, 0) == 0.0
    assert analytic.ccu_capacity_case2(p, lt_b2, 1) == 0.0
    assert analytic.ceu_capacity(p, lt_b2) > 0


def test_case2_vanishes_as_alpha_shrinks(lt_b2):
    caps = [analytic.ccu_capacity_case2(SystemParams(alpha=a, beta=1 - a, case=Case.CASE_II), lt_b2, 0)
            for a in (1e-2, 1e-4, 1e-6, 1e-8)]
    assert all(b < a for a, b in zip(caps, caps[1:]))
    assert caps[-1] < 1e-3


@pytest.mark.parametrize("preset", [preset_b2, preset_b3])
def test_monotone_in_sigma2_eps(preset):
    p = default_params()
    prev = None
    for eps in (0.0, 0.001, 0.01, 0.05):
        q = p.with_(sigma2_eps=eps)
        lt = link_table_for(preset(), q)
        cur = [analytic.ccu_capacity_case1(q, lt, j) for j in range(lt.n_bs)]
        cur.append(analytic.ceu_capacity(q, lt))
        if prev is not None:
            assert all(c < pv for c, pv in zip(cur, prev))
        prev = cur


@pytest.mark.parametrize("preset", [preset_b2, preset_b3])
@pytest.mark.parametrize("scheme, case", [("NOMA", "I"), ("NOMA", "II"), ("OMA", "I")])
def test_perfect_path_equivalence(preset, scheme, case):
    p = default_params().with_(scheme=Scheme(scheme), case=Case(case))
    lt = link_table_for(preset(), p)
    a = analytic.group_capacity(p, lt)
    b = analytic.perfect_csi_group_capacity(p, lt)
    np.testing.assert_allclose(a.ccu, b.ccu, rtol=1e-12, atol=0)
    assert a.ceu == pytest.approx(b.ceu, rel=1e-12)


def test_sum_decomposition(lt_b3, params):
    for case in Case:
        g = analytic.noma_group_capacity(params.with_(case=case), lt_b3)
        assert g.sum == g.ceu + sum(g.ccu)
    caps = analytic.all_capacities(params, lt_b3)
    for scheme, case in (("NOMA", "I"), ("NOMA", "II"), ("OMA", None)):
        parts = [caps[(scheme, case, f"CCU-{j}")] for j in (1, 2, 3)]
        assert caps[(scheme, case, "CCU-SUM")] == sum(parts)
        assert caps[(scheme, case, "SUM")] == caps[(scheme, case, "CEU")] + sum(parts)


def test_ceu_same_for_both_cases(lt_b3, params):
    caps = analytic.all_capacities(params, lt_b3)
    assert caps[("NOMA", "I", "CEU")] == caps[("NOMA", "II", "CEU")]


def test_case2_dominates_case1_and_oma_below():
    for preset in (preset_b2, preset_b3):
        for rho_db in (0, 10, 20, 30):
            for eps in (0, 0.001, 0.01, 0.05):
                p = default_params().with_(rho_db=rho_db, sigma2_eps=eps)
                caps = analytic.all_capacities(p, link_table_for(preset(), p))
                assert caps[("NOMA", "II", "SUM")] >= caps[("NOMA", "I", "SUM")]
    p = default_params()
    caps = analytic.all_capacities(p, link_table_for(preset_b2(), p))
    assert caps[("OMA", None, "SUM")] < caps[("NOMA", "II", "SUM")]


@pytest.mark.parametrize("beta", [0.5, 0.7, 0.9, 0.95, 0.99])
def test_ceu_ceiling(beta):
    for preset in (preset_b2, preset_b3):
        for rho_db in (0, 20, 40, 60):
            p = default_params().with_(beta=beta, rho_db=rho_db)
            c = analytic.ceu_capacity(p, link_table_for(preset(), p))
            assert 0 < c < math.log2(1 + p.beta / p.alpha)


def test_nonnegative_and_snr_monotone():
    for preset in (preset_b2, preset_b3):
        for eps in (0.0, 0.01, 0.05):
            prev = None
            for rho_db in range(0, 35, 5):
                p = default_params().with_(rho_db=rho_db, sigma2_eps=eps)
                caps = analytic.all_capacities(p, link_table_for(preset(), p))
                vals = np.array(list(caps.values()))
                assert np.all(np.isfinite(vals)) and np.all(vals >= 0)
                if prev is not None:
                    assert np.all(vals >= prev - 1e-12)
                prev = vals


def test_four_bs_layout():
    bs = [(0, 0), (2, 0), (2, 2), (0, 2)]
    ccu = [(0.45, 0.37), (1.52, 0.55), (1.43, 1.41), (0.61, 1.53)]
    lay = CellLayout(bs, ccu, (1.03, 0.91))
    p = default_params().with_(sigma2_eps=0.001)
    g = analytic.noma_group_capacity(p, link_table_for(lay, p))
    assert len(g.ccu) == 4 and all(c > 0 for c in g.ccu)


def test_symmetric_layout_collision_policy():
    # CCU-2 equidistant from BS-1 and BS-3: equal interference rates
    bs = [(0, 0), (2, 0), (2, 2), (0, 2)]
    ccu = [(0.45, 0.37), (1.0, 1.0), (1.43, 1.41), (0.61, 1.53)]
    lay = CellLayout(bs, ccu, (1.03, 0.91))
    p = default_params()
    lt = link_table_for(lay, p)
    with pytest.raises(RateCollisionError):
        analytic.noma_group_capacity(p, lt)
    g = analytic.noma_group_capacity(p, lt, CollisionPolicy.PERTURB)
    assert all(np.isfinite(g.ccu)) and all(c > 0 for c in g.ccu)


def test_bad_ccu_index(lt_b2, params):
    with pytest.raises(ParameterError):
        analytic.ccu_capacity_case1(params, lt_b2, 2)
