"""Predict trade from GDP and distance, and back out per-year omega.

    Trade_mn = (K / omega) * G_m^(alpha*rho_m) * G_n^(alpha*rho_n) / R^beta

K defaults to 2*k'*k''. k' and k'' come from fits on normalized series, so
with raw USD GDPs K only holds up to the normalization constants. Use
``calibrate_prefactor`` to pin K to one reference year of observed trade.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

COULOMB_BETA = 2.0
DEFAULT_BETA = 1.7


class PredictError(ValueError):
    pass


@dataclass(frozen=True)
class ComposedModel:
    alpha_rho_m: float
    alpha_rho_n: float
    beta: float
    prefactor: float
    omega_table: Mapping[tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.prefactor) and self.prefactor > 0):
            raise PredictError(f"prefactor must be positive, got {self.prefactor!r}")
        for v in (self.alpha_rho_m, self.alpha_rho_n, self.beta):
            if not math.isfinite(v):
                raise PredictError("model exponents must be finite")


def aggregate_rho(values: Iterable[float], rule: str = "mean") -> float:
    """Combine several per-country rho values into one.

    ``rule`` is ``"mean"`` or ``"median"``.
    """
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise PredictError("no rho values to aggregate")
    if rule == "mean":
        return float(arr.mean())
    if rule == "median":
        return float(np.median(arr))
    raise PredictError(f"unknown rho aggregation rule {rule!r}")


def compose(
    alpha: float,
    rho_m: float,
    rho_n: float,
    beta: float = DEFAULT_BETA,
    k_prime: float = 1.0,
    k_double_prime: float = 1.0,
) -> ComposedModel:
    for v in (alpha, rho_m, rho_n, beta, k_prime, k_double_prime):
        if not math.isfinite(v):
            raise PredictError("compose inputs must be finite")
    if k_prime <= 0 or k_double_prime <= 0:
        raise PredictError("k' and k'' must be positive")
    return ComposedModel(alpha * rho_m, alpha * rho_n, beta, 2.0 * k_prime * k_double_prime)


def _log_core(model: ComposedModel, G_m: float, G_n: float, R_mn: float) -> float:
    for name, v in (("G_m", G_m), ("G_n", G_n), ("R_mn", R_mn)):
        if not (math.isfinite(v) and v > 0):
            raise PredictError(f"{name} must be positive, got {v!r}")
    return (
        math.log(model.prefactor)
        + model.alpha_rho_m * math.log(G_m)
        + model.alpha_rho_n * math.log(G_n)
        - model.beta * math.log(R_mn)
    )


def predict_trade(
    model: ComposedModel, G_m: float, G_n: float, R_mn: float, omega: float = 1.0
) -> float:
    if not (math.isfinite(omega) and omega > 0):
        raise PredictError(f"omega must be positive, got {omega!r}")
    return math.exp(_log_core(model, G_m, G_n, R_mn) - math.log(omega))


@dataclass(frozen=True)
class PairYear:
    """Observed trade for one pair and year, with both GDPs."""

    year: int
    G_m: float
    G_n: float
    trade: float


def residual_omega(
    panel: Sequence[PairYear], R_mn: float, model: ComposedModel
) -> dict[int, float]:
    """Per-year omega that makes the model reproduce the observed trade.

    A year with zero observed trade maps to ``inf``.
    """
    out = {}
    for row in panel:
        if not math.isfinite(row.trade) or row.trade < 0:
            raise PredictError(f"{row.year}: observed trade must be non-negative")
        if row.trade == 0:
            out[row.year] = math.inf
            continue
        out[row.year] = math.exp(_log_core(model, row.G_m, row.G_n, R_mn) - math.log(row.trade))
    return out


def calibrate_prefactor(
    model: ComposedModel, row: PairYear, R_mn: float, omega: float = 1.0
) -> ComposedModel:
    """Return ``model`` with K chosen so ``row`` is reproduced exactly."""
    if not row.trade > 0:
        raise PredictError("reference year must have positive trade")
    unit = replace(model, prefactor=1.0)
    k = row.trade * omega / predict_trade(unit, row.G_m, row.G_n, R_mn)
    return replace(model, prefactor=k)
