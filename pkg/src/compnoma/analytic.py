"""Closed-form ergodic capacities of one CoMP group (B CCUs + 1 CEU).

CCU and BS indices are 0-based.  All capacities are in bits/s/Hz.  Every
``exp(c) Ei(-c)`` product is evaluated as ``-exp_scaled_e1(c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hypoexp
from .channel import LinkTable
from .errors import ParameterError
from .hypoexp import CollisionPolicy, RateKind, RateSet
from .params import Case, Scheme, SystemParams
from .special import exp_scaled_e1

LN2 = math.log(2.0)


@dataclass(frozen=True)
class GroupCapacity:
    ccu: tuple[float, ...]
    ceu: float
    sum: float

    @classmethod
    def assemble(cls, ccu, ceu) -> "GroupCapacity":
        ccu = tuple(float(c) for c in ccu)
        return cls(ccu, float(ceu), float(ceu) + sum(ccu))

    @property
    def ccu_sum(self) -> float:
        return sum(self.ccu)


def a_const(params: SystemParams, link_table: LinkTable, j: int) -> float:
    """``rho * sum_i sigma2_eps_ij + rho * upsilon + 1`` for CCU-j."""
    rho = params.rho
    return rho * float(np.sum(link_table.sigma2_eps_ccu[:, j])) + rho * params.upsilon + 1.0


def b_const(params: SystemParams, link_table: LinkTable) -> float:
    """``rho * sum_i sigma2_eps_ik + 1`` for the CEU."""
    return params.rho * float(np.sum(link_table.sigma2_eps_ceu)) + 1.0


def _log2_gain(full: RateSet, reduced: RateSet | None, offset: float) -> float:
    # E[log2(X + c)] - E[log2(Y + c)], with Y = 0 when reduced is None
    upper = hypoexp.expected_log(full, offset)
    lower = math.log(offset) if reduced is None else hypoexp.expected_log(reduced, offset)
    return (upper - lower) / LN2


def _check_ccu(link_table: LinkTable, j: int) -> None:
    if not 0 <= j < link_table.n_bs:
        raise ParameterError(f"CCU index {j} out of range for B={link_table.n_bs}")


def ccu_capacity_case1(params: SystemParams, link_table: LinkTable, j: int,
                       policy=CollisionPolicy.FAIL) -> float:
    """CCU-j capacity when the other BSs' signals reach it as interference."""
    _check_ccu(link_table, j)
    if params.alpha == 0:
        return 0.0
    a = a_const(params, link_table, j)
    full = hypoexp.rates_ccu(link_table, j, params.alpha, params.rho, True, policy)
    interf = hypoexp.rates_ccu(link_table, j, params.alpha, params.rho, False, policy)
    return _log2_gain(full, interf, a)


def ccu_n_param(params: SystemParams, link_table: LinkTable, j: int) -> float:
    """Rate of the exponential SINR ``W_j`` of an interference-free CCU-j."""
    lam = link_table.sigma2_hat_ccu[j, j]
    return a_const(params, link_table, j) / (params.rho * params.alpha * lam)


def ccu_capacity_case2(params: SystemParams, link_table: LinkTable, j: int) -> float:
    """CCU-j capacity with no cross-BS interference: ``e^n E1(n) / ln 2``."""
    _check_ccu(link_table, j)
    if params.alpha == 0:
        return 0.0
    return exp_scaled_e1(ccu_n_param(params, link_table, j)) / LN2


def ceu_capacity(params: SystemParams, link_table: LinkTable,
                 policy=CollisionPolicy.FAIL) -> float:
    """CEU capacity under joint transmission, treating CCU signals as noise.

    The CEU hears every BS, so Case I and Case II give the same value.
    """
    b = b_const(params, link_table)
    num = hypoexp.rates_ceu(link_table, params.alpha, params.rho, RateKind.CEU_NUM, policy)
    if params.alpha == 0:
        return _log2_gain(num, None, b)
    den = hypoexp.rates_ceu(link_table, params.alpha, params.rho, RateKind.CEU_DEN, policy)
    return _log2_gain(num, den, b)


def ccu_capacity(params: SystemParams, link_table: LinkTable, j: int,
                 policy=CollisionPolicy.FAIL) -> float:
    if params.case is Case.CASE_I:
        return ccu_capacity_case1(params, link_table, j, policy)
    return ccu_capacity_case2(params, link_table, j)


def noma_group_capacity(params: SystemParams, link_table: LinkTable,
                        policy=CollisionPolicy.FAIL) -> GroupCapacity:
    ccu = [ccu_capacity(params, link_table, j, policy) for j in range(link_table.n_bs)]
    return GroupCapacity.assemble(ccu, ceu_capacity(params, link_table, policy))


def oma_ccu_capacity(params: SystemParams, link_table: LinkTable, j: int) -> float:
    """CCU-j in its own 1/(B+1) slot, served only by BS-j."""
    _check_ccu(link_table, j)
    p_ccu, _ = params.oma_powers()
    if p_ccu == 0:
        return 0.0
    rho = params.rho
    eps = link_table.sigma2_eps_ccu[j, j]
    n = (1.0 + rho * eps) / (rho * p_ccu * link_table.sigma2_hat_ccu[j, j])
    return exp_scaled_e1(n) / LN2 / (link_table.n_bs + 1)


def oma_ceu_capacity(params: SystemParams, link_table: LinkTable,
                     policy=CollisionPolicy.FAIL) -> float:
    """CEU in its own 1/(B+1) slot with joint transmission from all BSs."""
    _, p_ceu = params.oma_powers()
    b = b_const(params, link_table)
    rates = RateSet.create(
        1.0 / (params.rho * p_ceu * link_table.sigma2_hat_ceu), RateKind.CEU_NUM, policy
    )
    return _log2_gain(rates, None, b) / (link_table.n_bs + 1)


def oma_group_capacity(params: SystemParams, link_table: LinkTable,
                       policy=CollisionPolicy.FAIL) -> GroupCapacity:
    ccu = [oma_ccu_capacity(params, link_table, j) for j in range(link_table.n_bs)]
    return GroupCapacity.assemble(ccu, oma_ceu_capacity(params, link_table, policy))


def group_capacity(params: SystemParams, link_table: LinkTable,
                   policy=CollisionPolicy.FAIL) -> GroupCapacity:
    if params.scheme is Scheme.COMP_OMA:
        return oma_group_capacity(params, link_table, policy)
    return noma_group_capacity(params, link_table, policy)


def perfect_csi_group_capacity(params: SystemParams, link_table: LinkTable) -> GroupCapacity:
    """Closed forms written directly for perfect CSI (true variances, no error terms).

    Independent of the imperfect-CSI code path; with ``sigma2_eps = 0`` the
    two must agree.
    """
    rho, alpha, n_bs = params.rho, params.alpha, link_table.n_bs
    lam_ccu, lam_ceu = link_table.sigma2_ccu, link_table.sigma2_ceu
    if params.scheme is Scheme.COMP_OMA:
        p_ccu, p_ceu = params.oma_powers()
        ccu = [exp_scaled_e1(1.0 / (rho * p_ccu * lam_ccu[j, j])) / LN2 / (n_bs + 1)
               for j in range(n_bs)]
        rates = RateSet(1.0 / (rho * p_ceu * lam_ceu))
        ceu = hypoexp.expected_log(rates, 1.0) / LN2 / (n_bs + 1)
        return GroupCapacity.assemble(ccu, ceu)

    a = rho * params.upsilon + 1.0
    ccu = []
    for j in range(n_bs):
        if params.case is Case.CASE_II:
            ccu.append(exp_scaled_e1(a / (rho * alpha * lam_ccu[j, j])) / LN2)
            continue
        k = 1.0 / (alpha * rho * lam_ccu[:, j])
        x_term = hypoexp.expected_log(RateSet(k), a)
        y_term = hypoexp.expected_log(RateSet(np.delete(k, j)), a)
        ccu.append((x_term - y_term) / LN2)
    l_rates = RateSet(1.0 / (rho * lam_ceu))
    m_rates = RateSet(1.0 / (alpha * rho * lam_ceu))
    ceu = (hypoexp.expected_log(l_rates, 1.0) - hypoexp.expected_log(m_rates, 1.0)) / LN2
    return GroupCapacity.assemble(ccu, ceu)


def all_capacities(params: SystemParams, link_table: LinkTable,
                   policy=CollisionPolicy.FAIL) -> dict[tuple[str, str | None, str], float]:
    """Every per-user and aggregate capacity, keyed like the Monte Carlo results.

    Keys are ``(scheme, case, user)`` with ``case`` ``None`` for OMA and
    ``user`` one of ``CCU-j``, ``CEU``, ``SUM``, ``CCU-SUM``.
    """
    out = {}
    for case in (Case.CASE_I, Case.CASE_II):
        g = noma_group_capacity(params.with_(scheme=Scheme.COMP_NOMA, case=case), link_table, policy)
        out.update(_keyed(Scheme.COMP_NOMA.value, case.value, g))
    g = oma_group_capacity(params.with_(scheme=Scheme.COMP_OMA), link_table, policy)
    out.update(_keyed(Scheme.COMP_OMA.value, None, g))
    return out


def _keyed(scheme: str, case: str | None, g: GroupCapacity) -> dict:
    out = {(scheme, case, f"CCU-{j + 1}"): c for j, c in enumerate(g.ccu)}
    out[(scheme, case, "CEU")] = g.ceu
    out[(scheme, case, "SUM")] = g.sum
    out[(scheme, case, "CCU-SUM")] = g.ccu_sum
    return out
