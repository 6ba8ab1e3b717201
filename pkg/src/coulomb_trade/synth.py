"""Synthetic trade panels generated from the model itself.

Generation order per year:

1. GDP per country: log-uniform base level, a per-country growth rate and
   iid log shocks.
2. Totals: E = k' * G^rho with G and E in ``gdp_unit`` USD, and I = k'' * E.
3. Bilateral flows, m -> n export = (E_m I_n)^alpha / (omega R^beta), times
   optional lognormal noise exp(noise_sigma * z). Each directed flow gets one
   draw, so both reporters' rows mirror exactly.
4. A rest-of-world partner ``ROW`` absorbs whatever the modeled partners
   don't take, so summing each reporter's flows gives back E and I exactly.

When ``omega`` is None one constant omega is chosen so modeled partners
take at most ``trade_share`` of any country's totals.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .trade_data import (
    Capital,
    CapitalTable,
    FlowPanel,
    FlowRecord,
    distances_from_capitals,
    pair_key,
)
from .dataset import write_bundle

REST_OF_WORLD = "ROW"


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n_countries: int = 4
    years: tuple[int, int] = (2009, 2019)
    alpha: float = 0.5
    beta: float = 1.7
    omega: float | Mapping[tuple[str, str], float] | None = None
    gdp_range: tuple[float, float] = (2e11, 2e13)
    growth_range: tuple[float, float] = (0.03, 0.10)
    gdp_shock: float = 0.05
    rho: float = 1.33
    k_prime: float = 0.25
    k_double_prime: float = 1.0
    gdp_unit: float = 1e12
    noise_sigma: float = 0.0
    trade_share: float = 0.5
    rng_seed: int = 0


def country_codes(n: int) -> list[str]:
    if n > 26 * 26:
        raise SynthError("at most 676 synthetic countries")
    return [f"X{chr(65 + i // 26)}{chr(65 + i % 26)}" for i in range(n)]


def _validate(cfg: SynthConfig) -> None:
    if cfg.n_countries < 2:
        raise SynthError("need at least two countries")
    y0, y1 = cfg.years
    if y1 < y0:
        raise SynthError("year range is empty")
    lo, hi = cfg.gdp_range
    if not 0 < lo <= hi:
        raise SynthError("gdp_range must be positive and ordered")
    if cfg.noise_sigma < 0:
        raise SynthError("noise_sigma must be non-negative")
    if cfg.alpha <= 0 or cfg.k_prime <= 0 or cfg.k_double_prime <= 0:
        raise SynthError("alpha, k' and k'' must be positive")
    if not 0 < cfg.trade_share < 1:
        raise SynthError("trade_share must lie in (0, 1)")


def implied_prefactor(cfg: SynthConfig) -> float:
    """K such that Trade = K/omega * (G_m G_n)^(alpha*rho) / R^beta, raw USD GDP."""
    u = cfg.gdp_unit
    log_prod = math.log(cfg.k_double_prime) + 2 * math.log(cfg.k_prime) + (2 - 2 * cfg.rho) * math.log(u)
    return 2.0 * math.exp(cfg.alpha * log_prod)


def _omega_lookup(cfg: SynthConfig, codes: list[str]):
    if cfg.omega is None or isinstance(cfg.omega, (int, float)):
        return None
    table = {pair_key(a, b): float(v) for (a, b), v in cfg.omega.items()}
    for i, a in enumerate(codes):
        for b in codes[i + 1:]:
            v = table.get((a, b))
            if v is None or not v > 0:
                raise SynthError(f"omega for {a}/{b} missing or non-positive")
    return table


def generate(cfg: SynthConfig):
    """Build ``(flows, gdp, capitals, distances, info)`` for a config."""
    _validate(cfg)
    rng = np.random.default_rng(cfg.rng_seed)
    codes = country_codes(cfg.n_countries)
    years = list(range(cfg.years[0], cfg.years[1] + 1))
    n, t = len(codes), len(years)

    lat = rng.uniform(-60.0, 60.0, n)
    lon = rng.uniform(-180.0, 180.0, n)
    capitals = CapitalTable({c: Capital(float(lat[i]), float(lon[i])) for i, c in enumerate(codes)})
    distances = distances_from_capitals(capitals, codes)

    lo, hi = cfg.gdp_range
    base = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    growth = rng.uniform(*cfg.growth_range, n)
    shocks = rng.normal(0.0, cfg.gdp_shock, (n, t))
    steps = np.arange(t)
    G = base[:, None] * np.exp(growth[:, None] * steps[None, :] + shocks)
    u = cfg.gdp_unit
    E = u * cfg.k_prime * (G / u) ** cfg.rho
    I = cfg.k_double_prime * E

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    # one draw per directed flow: [pair, year, (i->j, j->i)]
    z = rng.normal(0.0, 1.0, (len(pairs), t, 2))
    noise = np.exp(cfg.noise_sigma * z)

    omega_table = _omega_lookup(cfg, codes)
    logE, logI = np.log(E), np.log(I)
    raw = np.empty((len(pairs), t, 2))
    for p, (i, j) in enumerate(pairs):
        R = distances.entries[pair_key(codes[i], codes[j])]
        w = 1.0 if omega_table is None else omega_table[(codes[i], codes[j])]
        scale = -cfg.beta * math.log(R) - math.log(w)
        raw[p, :, 0] = np.exp(cfg.alpha * (logE[i] + logI[j]) + scale)
        raw[p, :, 1] = np.exp(cfg.alpha * (logI[i] + logE[j]) + scale)
    raw *= noise

    if omega_table is None:
        if cfg.omega is None:
            share = _max_share(raw, pairs, E, I)
            omega = share / cfg.trade_share
        else:
            omega = float(cfg.omega)
            if not omega > 0:
                raise SynthError("omega must be positive")
        flows_arr = raw / omega
    else:
        omega = None
        flows_arr = raw

    if _max_share(flows_arr, pairs, E, I) >= 1.0:
        raise SynthError("infeasible config: bilateral flows exceed country totals; raise omega")

    records: dict[tuple[str, str, int], FlowRecord] = {}
    out_e = np.zeros((n, t))
    out_i = np.zeros((n, t))
    for p, (i, j) in enumerate(pairs):
        for k, year in enumerate(years):
            f_ij, f_ji = float(flows_arr[p, k, 0]), float(flows_arr[p, k, 1])
            records[(codes[i], codes[j], year)] = FlowRecord(f_ij, f_ji)
            records[(codes[j], codes[i], year)] = FlowRecord(f_ji, f_ij)
            out_e[i, k] += f_ij
            out_i[i, k] += f_ji
            out_e[j, k] += f_ji
            out_i[j, k] += f_ij
    for i, c in enumerate(codes):
        for k, year in enumerate(years):
            records[(c, REST_OF_WORLD, year)] = FlowRecord(
                float(E[i, k] - out_e[i, k]), float(I[i, k] - out_i[i, k])
            )

    gdp = {(c, year): float(G[i, k]) for i, c in enumerate(codes) for k, year in enumerate(years)}
    info = {
        "omega": omega,
        "implied_prefactor": implied_prefactor(cfg),
    }
    return FlowPanel(records), gdp, capitals, distances, info


def _max_share(flows_arr, pairs, E, I) -> float:
    n, t = E.shape
    out_e = np.zeros((n, t))
    out_i = np.zeros((n, t))
    for p, (i, j) in enumerate(pairs):
        out_e[i] += flows_arr[p, :, 0]
        out_i[j] += flows_arr[p, :, 0]
        out_e[j] += flows_arr[p, :, 1]
        out_i[i] += flows_arr[p, :, 1]
    return float(max((out_e / E).max(), (out_i / I).max()))


def config_dict(cfg: SynthConfig) -> dict:
    d = asdict(cfg)
    d["years"] = list(cfg.years)
    d["gdp_range"] = list(cfg.gdp_range)
    d["growth_range"] = list(cfg.growth_range)
    if isinstance(cfg.omega, Mapping):
        d["omega"] = {f"{a}-{b}": v for (a, b), v in sorted(cfg.omega.items())}
    return d


def generate_synthetic(cfg: SynthConfig, directory: str | Path) -> dict:
    """Generate a panel and write it as a dataset bundle. Returns the manifest."""
    flows, gdp, capitals, distances, info = generate(cfg)
    extra = {"synthetic": {"config": config_dict(cfg), **info}}
    return write_bundle(directory, flows, gdp, distances, capitals, extra)
