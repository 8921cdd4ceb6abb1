"""Scalar system parameters shared by the analytic and Monte Carlo paths."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import ParameterError

SUM_TOL = 1e-12


class Case(str, enum.Enum):
    """CCU pairing outcome: with (I) or without (II) cross-BS interference."""

    CASE_I = "I"
    CASE_II = "II"


class Scheme(str, enum.Enum):
    COMP_NOMA = "NOMA"
    COMP_OMA = "OMA"


class OmaPower(str, enum.Enum):
    """Transmit power a user gets inside its orthogonal OMA slot.

    ``SPLIT`` keeps the NOMA fractions (alpha for a CCU, beta for the CEU);
    ``FULL`` gives every user the whole per-BS power.
    """

    SPLIT = "split"
    FULL = "full"


def db_to_linear(db: float) -> float:
    return 0.0 if db == -math.inf else 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return -math.inf if value == 0 else 10.0 * math.log10(value)


@dataclass(frozen=True)
class SystemParams:
    """Power split, SNR, estimation error and residual SIC interference.

    ``rho`` and ``upsilon`` are linear; use :meth:`from_db` to build from dB.
    Bandwidth is 1 Hz throughout, so capacities are in bits/s/Hz.
    """

    alpha: float = 0.05
    beta: float = 0.95
    rho: float = 100.0
    sigma2_eps: float = 0.0
    upsilon: float = 10.0 ** -2.5
    v: float = 4.0
    case: Case = Case.CASE_I
    scheme: Scheme = Scheme.COMP_NOMA
    oma_power: OmaPower = OmaPower.SPLIT

    def __post_init__(self):
        object.__setattr__(self, "case", Case(self.case))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "oma_power", OmaPower(self.oma_power))
        if abs(self.alpha + self.beta - 1.0) > SUM_TOL:
            raise ParameterError(f"alpha + beta must equal 1, got {self.alpha} + {self.beta}")
        if not 0 <= self.alpha <= self.beta:
            raise ParameterError(f"need 0 <= alpha <= beta, got alpha={self.alpha}, beta={self.beta}")
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ParameterError(f"rho must be finite and > 0, got {self.rho}")
        if self.sigma2_eps < 0:
            raise ParameterError(f"sigma2_eps must be >= 0, got {self.sigma2_eps}")
        if self.upsilon < 0:
            raise ParameterError(f"upsilon must be >= 0, got {self.upsilon}")
        if not self.v > 0:
            raise ParameterError(f"path-loss exponent must be > 0, got {self.v}")

    @classmethod
    def from_db(cls, rho_db: float = 20.0, upsilon_db: float = -25.0, **kwargs) -> "SystemParams":
        return cls(rho=db_to_linear(rho_db), upsilon=db_to_linear(upsilon_db), **kwargs)

    @property
    def rho_db(self) -> float:
        return linear_to_db(self.rho)

    @property
    def upsilon_db(self) -> float:
        return linear_to_db(self.upsilon)

    def with_(self, **changes) -> "SystemParams":
        if "beta" in changes and "alpha" not in changes:
            changes["alpha"] = 1.0 - changes["beta"]
        elif "alpha" in changes and "beta" not in changes:
            changes["beta"] = 1.0 - changes["alpha"]
        if "rho_db" in changes:
            changes["rho"] = db_to_linear(changes.pop("rho_db"))
        if "upsilon_db" in changes:
            changes["upsilon"] = db_to_linear(changes.pop("upsilon_db"))
        return replace(self, **changes)

    def oma_powers(self) -> tuple[float, float]:
        """(CCU power, CEU power) within an OMA slot."""
        if self.oma_power is OmaPower.SPLIT:
            return self.alpha, self.beta
        return 1.0, 1.0
