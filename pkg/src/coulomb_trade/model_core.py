"""Evaluation of the Coulomb trade equation.

For a country pair (m, n) in year t:

    Trade_mn = (1/omega) * [(E_m I_n)^alpha + (I_m E_n)^alpha] / R^beta

E and I are total exports and imports. ``omega`` is the pair's "dielectric
constant": every factor other than the trade totals and distance. The
literature also writes it as epsilon; here it is always omega.

Powers are evaluated in log space because E*I reaches ~1e24 USD^2 for
large economies. The interaction term carries units USD^(2*alpha); omega
absorbs the mismatch and nothing is nondimensionalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ModelError(ValueError):
    pass


def _positive(name: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise ModelError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PairObservation:
    year: int
    E_m: float
    I_m: float
    E_n: float
    I_n: float
    trade_mn: float

    def __post_init__(self):
        for name in ("E_m", "I_m", "E_n", "I_n", "trade_mn"):
            _positive(name, getattr(self, name))

    def swapped(self) -> PairObservation:
        """Same observation with the roles of m and n exchanged."""
        return PairObservation(self.year, self.E_n, self.I_n, self.E_m, self.I_m, self.trade_mn)


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    beta: float
    omega: float = 1.0

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("omega", self.omega)
        if not math.isfinite(self.beta):
            raise ModelError(f"beta must be finite, got {self.beta!r}")


def log_interaction(E_m: float, I_m: float, E_n: float, I_n: float, alpha: float) -> float:
    """ln[(E_m I_n)^alpha + (I_m E_n)^alpha] without leaving log space."""
    _positive("alpha", alpha)
    for name, v in (("E_m", E_m), ("I_m", I_m), ("E_n", E_n), ("I_n", I_n)):
        _positive(name, v)
    a = alpha * (math.log(E_m) + math.log(I_n))
    b = alpha * (math.log(I_m) + math.log(E_n))
    return float(np.logaddexp(a, b))


def interaction_term(obs: PairObservation, alpha: float) -> float:
    x = log_interaction(obs.E_m, obs.I_m, obs.E_n, obs.I_n, alpha)
    try:
        value = math.exp(x)
    except OverflowError:
        raise ModelError(f"interaction term overflows at alpha={alpha}") from None
    return value


def trade_value(
    E_m: float, I_m: float, E_n: float, I_n: float, R_mn: float, params: ModelParams
) -> float:
    if not (math.isfinite(R_mn) and R_mn > 0):
        raise ModelError(f"distance must be positive, got {R_mn!r}")
    log_t = (
        log_interaction(E_m, I_m, E_n, I_n, params.alpha)
        - params.beta * math.log(R_mn)
        - math.log(params.omega)
    )
    try:
        return math.exp(log_t)
    except OverflowError:
        raise ModelError("trade value overflows") from None


def log_form(obs: PairObservation, alpha: float) -> tuple[float, float]:
    """Regression coordinates (x, y) = (ln interaction, ln trade)."""
    x = log_interaction(obs.E_m, obs.I_m, obs.E_n, obs.I_n, alpha)
    return x, math.log(obs.trade_mn)


def symmetry_check(obs: PairObservation, alpha: float) -> float:
    """Relative gap between Trade_mn and Trade_nm at equal omega and distance.

    The equation is symmetric under m <-> n, so this should be zero up to
    roundoff. Distance and omega cancel in the ratio and are fixed at 1.
    """
    params = ModelParams(alpha, 0.0, 1.0)
    s = obs.swapped()
    t_mn = trade_value(obs.E_m, obs.I_m, obs.E_n, obs.I_n, 1.0, params)
    t_nm = trade_value(s.E_m, s.I_m, s.E_n, s.I_n, 1.0, params)
    return abs(t_mn - t_nm) / max(t_mn, t_nm)


def invert_dielectric(
    E_m: float,
    I_m: float,
    E_n: float,
    I_n: float,
    trade_mn: float,
    R_mn: float,
    alpha: float,
    beta: float,
) -> float:
    """Solve the trade equation for omega given an observed trade value.

    Zero trade (no exchange at all, e.g. an embargo) returns ``inf``.
    """
    if not (math.isfinite(R_mn) and R_mn > 0):
        raise ModelError(f"distance must be positive, got {R_mn!r}")
    if not math.isfinite(trade_mn) or trade_mn < 0:
        raise ModelError(f"trade must be finite and non-negative, got {trade_mn!r}")
    if trade_mn == 0:
        return math.inf
    x = log_interaction(E_m, I_m, E_n, I_n, alpha)
    return math.exp(x - math.log(trade_mn) - beta * math.log(R_mn))


def observation_dielectric(obs: PairObservation, R_mn: float, alpha: float, beta: float) -> float:
    return invert_dielectric(obs.E_m, obs.I_m, obs.E_n, obs.I_n, obs.trade_mn, R_mn, alpha, beta)
