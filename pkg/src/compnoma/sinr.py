"""Instantaneous SINRs for a fading draw.

Functions broadcast over leading sample axes of the :class:`FadingDraw`
arrays.  ``j`` is the 0-based CCU index.
"""

from __future__ import annotations

import numpy as np

from .channel import FadingDraw, LinkTable
from .params import SystemParams


def sinr_ccu_case1(draw: FadingDraw, params: SystemParams, link_table: LinkTable, j: int,
                   interference: bool = True):
    """SINR of CCU-j decoding its own signal after SIC of the CEU signal.

    ``interference=False`` zeroes the cross-BS terms (Case II pairing).
    """
    g = np.asarray(draw.g_ccu)
    own = g[..., j, j]
    if interference:
        others = np.arange(g.shape[-1]) != j
        cross = g[..., others, j].sum(axis=-1)
    else:
        cross = 0.0
    floor = np.sum(link_table.sigma2_eps_ccu[:, j]) + params.upsilon + 1.0 / params.rho
    return params.alpha * own / (params.alpha * cross + floor)


def sinr_ccu_case2(draw: FadingDraw, params: SystemParams, link_table: LinkTable, j: int):
    return sinr_ccu_case1(draw, params, link_table, j, interference=False)


def sinr_ccu_decode_ceu(draw: FadingDraw, params: SystemParams, link_table: LinkTable, j: int):
    """SINR at CCU-j when decoding the CEU signal (the SIC stage).

    Diagnostic only: residual SIC interference is modelled by ``upsilon``.
    """
    total = np.asarray(draw.g_ccu)[..., :, j].sum(axis=-1)
    floor = np.sum(link_table.sigma2_eps_ccu[:, j]) + 1.0 / params.rho
    return params.beta * total / (params.alpha * total + floor)


def sinr_ceu(draw: FadingDraw, params: SystemParams, link_table: LinkTable):
    """SINR of the CEU, treating all CCU signals as noise."""
    total = np.asarray(draw.g_ceu).sum(axis=-1)
    floor = np.sum(link_table.sigma2_eps_ceu) + 1.0 / params.rho
    return params.beta * total / (params.alpha * total + floor)


def sinr_oma_ccu(draw: FadingDraw, params: SystemParams, link_table: LinkTable, j: int):
    """SINR of CCU-j in its orthogonal slot (no other BS transmits)."""
    p_ccu, _ = params.oma_powers()
    own = np.asarray(draw.g_ccu)[..., j, j]
    return p_ccu * own / (link_table.sigma2_eps_ccu[j, j] + 1.0 / params.rho)


def sinr_oma_ceu(draw: FadingDraw, params: SystemParams, link_table: LinkTable):
    """SINR of the CEU in its orthogonal slot under joint transmission."""
    _, p_ceu = params.oma_powers()
    total = np.asarray(draw.g_ceu).sum(axis=-1)
    return p_ceu * total / (np.sum(link_table.sigma2_eps_ceu) + 1.0 / params.rho)
