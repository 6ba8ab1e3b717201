"""Fitting procedures for alpha, beta, rho, import/export linearity and the
spread of per-pair alphas."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .model_core import PairObservation, log_form
from .trade_data import NormalizedSeries

ALPHA_BRACKET = (0.01, 3.0)
ALPHA_XTOL = 1e-12
SLOPE_TOLERANCE = 1e-3
MIN_YEARS = 4


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class OlsFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def predict(self, x):
        return self.slope * np.asarray(x) + self.intercept


@dataclass(frozen=True)
class PairFit:
    pair: tuple[str, str]
    alpha: float
    fit: OlsFit
    years_used: tuple[int, ...]

    @property
    def converged(self) -> bool:
        return abs(self.fit.slope - 1.0) <= SLOPE_TOLERANCE


@dataclass(frozen=True)
class TripleFit:
    numerator_pair: tuple[str, str]
    denominator_pair: tuple[str, str]
    beta: float
    fit: OlsFit
    distance_ratio: float
    years_used: tuple[int, ...] = ()


@dataclass(frozen=True)
class AlphaDistribution:
    mu: float
    sigma: float
    samples: tuple[float, ...]


@dataclass(frozen=True)
class PowerLawFit:
    country: str
    rho: float
    k_prime: float
    fit: OlsFit
    years_used: tuple[int, ...] = ()


@dataclass(frozen=True)
class LinearityFit:
    country: str
    slope: float
    r_squared: float
    years_used: tuple[int, ...] = field(default=())


def ols(points: Sequence[tuple[float, float]]) -> OlsFit:
    """Ordinary least squares line through ``(x, y)`` points.

    Degenerate x (zero variance) is an error. A constant y gives a flat
    line with R^2 = 1 since the fit is exact.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise FitError("ols needs at least two (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if not np.all(np.isfinite(pts)):
        raise FitError("ols points must be finite")
    if np.ptp(x) == 0:
        raise FitError("ols: x values have zero variance")
    if np.ptp(y) == 0:
        return OlsFit(0.0, float(y[0]), 1.0, len(x))
    dx = x - x.mean()
    dy = y - y.mean()
    slope = float(dx @ dy / (dx @ dx))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    if ss_tot == 0:  # spread in y too small to square
        r2 = 1.0 if ss_res == 0 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return OlsFit(slope, intercept, r2, len(x))


def _alpha_points(series: Sequence[PairObservation], alpha: float) -> list[tuple[float, float]]:
    return [log_form(obs, alpha) for obs in series]


def fit_alpha(
    series: Sequence[PairObservation],
    pair: tuple[str, str] = ("", ""),
    bracket: tuple[float, float] = ALPHA_BRACKET,
    xtol: float = ALPHA_XTOL,
) -> PairFit:
    """Pick alpha so that ln(trade) against ln(interaction) has slope one.

    Root-finds ``slope(alpha) - 1`` by bisection over ``bracket``; only a
    sign change is required, not monotonicity.
    """
    if len(series) < MIN_YEARS:
        raise FitError(f"{len(series)} usable years; need at least {MIN_YEARS}")

    def g(alpha):
        return ols(_alpha_points(series, alpha)).slope - 1.0

    lo, hi = bracket
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0:
        root = lo
    elif g_hi == 0:
        root = hi
    elif g_lo * g_hi > 0:
        raise FitError(
            f"slope-one unattainable: g({lo})={g_lo:.6g}, g({hi})={g_hi:.6g}"
        )
    else:
        root = optimize.bisect(g, lo, hi, xtol=xtol, maxiter=200)
    fit = ols(_alpha_points(series, root))
    return PairFit(tuple(pair), float(root), fit, tuple(o.year for o in series))


def _common_years(a: Sequence[PairObservation], b: Sequence[PairObservation]):
    by_year = {o.year: o for o in b}
    return [(o, by_year[o.year]) for o in sorted(a, key=lambda o: o.year) if o.year in by_year]


def beta_from_intercept(intercept: float, r_num: float, r_den: float) -> float:
    """Distance exponent implied by the trade-ratio regression intercept.

    With the numerator pair at distance ``r_num`` and the denominator pair at
    ``r_den``, the intercept equals ``beta * ln(r_den / r_num)``.
    """
    if not (r_num > 0 and r_den > 0):
        raise FitError("distances must be positive")
    log_ratio = math.log(r_den / r_num)
    if log_ratio == 0:
        raise FitError("beta unidentifiable: both pairs are at the same distance")
    return intercept / log_ratio


def beta_points(
    numerator: Sequence[PairObservation],
    denominator: Sequence[PairObservation],
    alpha_num: float,
    alpha_den: float,
) -> list[tuple[int, float, float]]:
    """``(year, x', y')`` for the trade-ratio regression over shared years."""
    out = []
    for num, den in _common_years(numerator, denominator):
        x_num, y_num = log_form(num, alpha_num)
        x_den, y_den = log_form(den, alpha_den)
        out.append((num.year, x_num - x_den, y_num - y_den))
    return out


def fit_beta(
    numerator: Sequence[PairObservation],
    denominator: Sequence[PairObservation],
    alpha_num: float,
    alpha_den: float,
    r_num: float,
    r_den: float,
    numerator_pair: tuple[str, str] = ("", ""),
    denominator_pair: tuple[str, str] = ("", ""),
) -> TripleFit:
    """Estimate beta from two pairs assumed to share the same omega.

    Each pair keeps its own alpha. Only the distance ratio enters, so the
    result does not depend on the distance unit.
    """
    if not (r_num > 0 and r_den > 0):
        raise FitError("distances must be positive")
    if r_num == r_den:
        raise FitError("beta unidentifiable: both pairs are at the same distance")
    pts = beta_points(numerator, denominator, alpha_num, alpha_den)
    if len(pts) < MIN_YEARS:
        raise FitError(f"{len(pts)} shared years; need at least {MIN_YEARS}")
    fit = ols([(x, y) for _, x, y in pts])
    beta = beta_from_intercept(fit.intercept, r_num, r_den)
    return TripleFit(
        tuple(numerator_pair),
        tuple(denominator_pair),
        beta,
        fit,
        r_den / r_num,
        tuple(year for year, _, _ in pts),
    )


def _values(series) -> Mapping[int, float]:
    return series.values if isinstance(series, NormalizedSeries) else series


def _shared(a, b) -> list[int]:
    a, b = _values(a), _values(b)
    years = sorted(set(a) & set(b))
    if len(years) < MIN_YEARS:
        raise FitError(f"{len(years)} shared years; need at least {MIN_YEARS}")
    return years


def fit_rho(exports, gdp, country: str = "") -> PowerLawFit:
    """Log-log fit of exports on GDP: ln E = ln k' + rho ln G.

    Accepts normalized series or plain ``{year: value}`` mappings.
    """
    years = _shared(exports, gdp)
    e, g = _values(exports), _values(gdp)
    pts = []
    for y in years:
        if not (e[y] > 0 and g[y] > 0):
            raise FitError(f"{country or 'series'} {y}: values must be positive for a log fit")
        pts.append((math.log(g[y]), math.log(e[y])))
    fit = ols(pts)
    return PowerLawFit(country, fit.slope, math.exp(fit.intercept), fit, tuple(years))


def fit_linearity(imports, exports, country: str = "") -> LinearityFit:
    """Through-origin fit I = k'' E.

    R^2 is measured against the mean-centred total sum of squares, so it can
    fall below zero when a line through the origin fits badly.
    """
    years = _shared(imports, exports)
    i = np.array([_values(imports)[y] for y in years], dtype=float)
    e = np.array([_values(exports)[y] for y in years], dtype=float)
    see = float(e @ e)
    if see == 0:
        raise FitError("exports are all zero")
    slope = float(e @ i) / see
    resid = i - slope * e
    dev = i - i.mean()
    ss_tot = float(dev @ dev)
    ss_res = float(resid @ resid)
    if ss_tot == 0:
        r2 = 1.0 if ss_res == 0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return LinearityFit(country, slope, r2, tuple(years))


def alpha_distribution(samples: Sequence[float]) -> AlphaDistribution:
    """Arithmetic mean and population (divisor N) standard deviation."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < 2:
        raise FitError("need at least two alpha samples")
    mu = float(arr.mean())
    sigma = float(np.sqrt(np.mean((arr - mu) ** 2)))
    return AlphaDistribution(mu, sigma, tuple(float(a) for a in arr))


def normal_cdf(alpha: float, mu: float, sigma: float) -> float:
    if not sigma > 0:
        raise FitError(f"sigma must be positive, got {sigma!r}")
    return 0.5 * (1.0 + math.erf((alpha - mu) / (sigma * math.sqrt(2.0))))


def cdf_residuals(
    samples: Sequence[float], dist: AlphaDistribution
) -> list[tuple[float, float, float, float]]:
    """Empirical vs fitted normal CDF at each sorted sample.

    Rows are ``(alpha, i/N, F(alpha), i/N - F(alpha))``. With sigma = 0 the
    model CDF is a step at mu.
    """
    xs = sorted(samples)
    n = len(xs)
    if n < 2:
        raise FitError("need at least two alpha samples")
    rows = []
    for i, a in enumerate(xs, start=1):
        if dist.sigma > 0:
            model = normal_cdf(a, dist.mu, dist.sigma)
        else:
            model = 1.0 if a >= dist.mu else 0.0
        emp = i / n
        rows.append((a, emp, model, emp - model))
    return rows
