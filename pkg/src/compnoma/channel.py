"""Path-loss variances, the estimated/error variance split, and Rayleigh fading draws."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import ParameterError, VarianceExhaustedError
from .geometry import DistanceTable


@dataclass(frozen=True)
class LinkStats:
    sigma2: float
    sigma2_hat: float
    sigma2_eps: float


@dataclass(frozen=True)
class LinkTable:
    """Variances of every BS-user link.

    Arrays follow :class:`~compnoma.geometry.DistanceTable`: ``[i, j]`` is
    BS-i to CCU-j and ``[i]`` is BS-i to the CEU.  ``sigma2_hat`` is the
    variance of the estimated channel, ``sigma2_eps`` of the estimation error.
    """

    sigma2_ccu: np.ndarray
    sigma2_eps_ccu: np.ndarray
    sigma2_ceu: np.ndarray
    sigma2_eps_ceu: np.ndarray
    path_loss_exponent: float

    @property
    def n_bs(self) -> int:
        return len(self.sigma2_ceu)

    @property
    def sigma2_hat_ccu(self) -> np.ndarray:
        return self.sigma2_ccu - self.sigma2_eps_ccu

    @property
    def sigma2_hat_ceu(self) -> np.ndarray:
        return self.sigma2_ceu - self.sigma2_eps_ceu

    def ccu_link(self, i: int, j: int) -> LinkStats:
        return LinkStats(
            float(self.sigma2_ccu[i, j]),
            float(self.sigma2_hat_ccu[i, j]),
            float(self.sigma2_eps_ccu[i, j]),
        )

    def ceu_link(self, i: int) -> LinkStats:
        return LinkStats(
            float(self.sigma2_ceu[i]),
            float(self.sigma2_hat_ceu[i]),
            float(self.sigma2_eps_ceu[i]),
        )

    def perfect(self) -> "LinkTable":
        """Same links with zero estimation error."""
        return LinkTable(
            self.sigma2_ccu,
            np.zeros_like(self.sigma2_eps_ccu),
            self.sigma2_ceu,
            np.zeros_like(self.sigma2_eps_ceu),
            self.path_loss_exponent,
        )


def build_link_table(dist: DistanceTable, v: float, sigma2_eps=0.0) -> LinkTable:
    """Variances ``d**-v`` per link, minus the estimation-error variance.

    ``sigma2_eps`` is normally one value shared by every link.  A mapping with
    keys ``"ccu"`` (shape ``(B, B)``) and ``"ceu"`` (shape ``(B,)``) gives
    per-link values instead.
    """
    if not v > 0:
        raise ParameterError(f"path-loss exponent must be > 0, got {v}")
    n_bs = dist.n_bs
    if isinstance(sigma2_eps, dict):
        eps_ccu = np.broadcast_to(np.asarray(sigma2_eps["ccu"], dtype=float), (n_bs, n_bs)).copy()
        eps_ceu = np.broadcast_to(np.asarray(sigma2_eps["ceu"], dtype=float), (n_bs,)).copy()
    else:
        eps_ccu = np.full((n_bs, n_bs), float(sigma2_eps))
        eps_ceu = np.full(n_bs, float(sigma2_eps))
    if np.any(eps_ccu < 0) or np.any(eps_ceu < 0):
        raise ParameterError("sigma2_eps must be >= 0")

    sigma2_ccu = dist.d_ccu ** (-float(v))
    sigma2_ceu = dist.d_ceu ** (-float(v))

    # report the weakest exhausted link, the one a user is most likely to hit first
    bad_ccu = np.argwhere(eps_ccu >= sigma2_ccu)
    bad_ceu = np.flatnonzero(eps_ceu >= sigma2_ceu)
    candidates = [(sigma2_ccu[i, j], f"BS-{i + 1} -> CCU-{j + 1}", eps_ccu[i, j]) for i, j in bad_ccu]
    candidates += [(sigma2_ceu[i], f"BS-{i + 1} -> CEU", eps_ceu[i]) for i in bad_ceu]
    if candidates:
        s2, name, eps = min(candidates)
        raise VarianceExhaustedError(name, s2, eps)

    return LinkTable(sigma2_ccu, eps_ccu, sigma2_ceu, eps_ceu, float(v))


@dataclass(frozen=True)
class FadingDraw:
    """Channel power gains ``|h_hat|**2``; leading axes (if any) index samples."""

    g_ccu: np.ndarray
    g_ceu: np.ndarray


def ccu_link_index(i: int, j: int, n_bs: int) -> int:
    return i * n_bs + j


def ceu_link_index(i: int, n_bs: int) -> int:
    return n_bs * n_bs + i


def sample_batch(link_table: LinkTable, seed: int, start: int, count: int) -> FadingDraw:
    """Draws for samples ``start .. start + count - 1``.

    Each gain is exponential with mean ``sigma2_hat`` of its link; the variate
    for (seed, sample, link) does not depend on ``start`` or ``count``.
    """
    n_bs = link_table.n_bs
    s = np.arange(start, start + count, dtype=np.uint64)
    links = np.arange(n_bs * n_bs + n_bs, dtype=np.uint64)
    u = rng.uniform_open(seed, s[:, None], links[None, :])
    means = np.concatenate([link_table.sigma2_hat_ccu.ravel(), link_table.sigma2_hat_ceu])
    g = -means * np.log(u)
    return FadingDraw(
        g[:, : n_bs * n_bs].reshape(count, n_bs, n_bs),
        g[:, n_bs * n_bs :],
    )


def sample(link_table: LinkTable, seed: int, sample_index: int = 0) -> FadingDraw:
    """One fading realization."""
    batch = sample_batch(link_table, seed, sample_index, 1)
    return FadingDraw(batch.g_ccu[0], batch.g_ceu[0])
