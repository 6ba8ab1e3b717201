import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_trade.model_core import (
    ModelError,
    ModelParams,
    PairObservation,
    interaction_term,
    invert_dielectric,
    log_form,
    log_interaction,
    observation_dielectric,
    symmetry_check,
    trade_value,
)

usd = st.floats(1e3, 1e13)
alphas = st.floats(0.05, 2.0)


def obs(E_m=1.0, I_m=1.0, E_n=1.0, I_n=1.0, trade=1.0, year=2010):
    return PairObservation(year, E_m, I_m, E_n, I_n, trade)


def mp_interaction(E_m, I_m, E_n, I_n, alpha):
    with mpmath.workdps(50):
        a = mpmath.mpf(alpha)
        return (mpmath.mpf(E_m) * I_n) ** a + (mpmath.mpf(I_m) * E_n) ** a


@pytest.mark.parametrize("alpha", [0.1, 0.47, 1.0, 2.5])
def test_unit_inputs_give_two(alpha):
    assert interaction_term(obs(), alpha) == pytest.approx(2.0, rel=1e-15)


def test_symmetric_products():
    assert interaction_term(obs(4, 1, 4, 1), 0.5) == pytest.approx(4.0, rel=1e-15)


def test_extended_precision_oracle():
    expected = float(mp_interaction(2, 5, 7, 3, 0.47))
    assert interaction_term(obs(2, 5, 7, 3), 0.47) == pytest.approx(expected, rel=1e-14)


def test_usd_scale_does_not_overflow():
    o = obs(2e12, 2.5e12, 3e11, 4e11)
    x, _ = log_form(o, 3.0)
    assert x == pytest.approx(float(mpmath.log(mp_interaction(2e12, 2.5e12, 3e11, 4e11, 3.0))), rel=1e-14)
    with pytest.raises(ModelError, match="overflow"):
        interaction_term(o, 13.0)
    assert math.isfinite(log_form(o, 13.0)[0])


def test_observation_rejects_non_positive():
    with pytest.raises(ModelError):
        obs(trade=0.0)
    with pytest.raises(ModelError):
        obs(E_m=-1.0)


def test_params_validation():
    with pytest.raises(ModelError):
        ModelParams(0.0, 1.7)
    with pytest.raises(ModelError):
        ModelParams(0.5, 1.7, omega=0.0)
    with pytest.raises(ModelError):
        ModelParams(0.5, math.nan)


def test_trade_value_examples():
    p = ModelParams(0.8, 1.234, 1.0)
    assert trade_value(1, 1, 1, 1, 1.0, p) == pytest.approx(2.0, rel=1e-15)
    base = trade_value(3e9, 4e9, 5e9, 2e9, 800.0, ModelParams(0.47, 1.7, 1.0))
    doubled = trade_value(3e9, 4e9, 5e9, 2e9, 800.0, ModelParams(0.47, 1.7, 2.0))
    assert doubled == pytest.approx(base / 2, rel=1e-14)
    with pytest.raises(ModelError):
        trade_value(1, 1, 1, 1, 0.0, p)


def test_trade_value_matches_formula():
    rng = np.random.default_rng(11)
    for _ in range(50):
        E_m, I_m, E_n, I_n = rng.uniform(1e9, 1e12, 4)
        R = rng.uniform(100, 15000)
        direct = ((E_m * I_n) ** 0.47 + (I_m * E_n) ** 0.47) / R ** 1.7
        assert trade_value(E_m, I_m, E_n, I_n, R, ModelParams(0.47, 1.7)) == pytest.approx(direct, rel=1e-12)


def test_log_form_examples():
    # interaction = e when each product^alpha = e/2; pick alpha = 1
    h = math.e / 2
    x, y = log_form(obs(h, h, 1, 1, trade=math.e), 1.0)
    assert (x, y) == (pytest.approx(1.0, rel=1e-15), pytest.approx(1.0, rel=1e-15))
    assert log_form(obs(3, 4, 5, 6, trade=1.0), 0.4)[1] == 0.0


@given(usd, usd, usd, usd, usd, alphas)
def test_log_form_matches_log_of_interaction(E_m, I_m, E_n, I_n, trade, alpha):
    x, y = log_form(obs(E_m, I_m, E_n, I_n, trade), alpha)
    with mpmath.workdps(40):
        assert x == pytest.approx(float(mpmath.log(mp_interaction(E_m, I_m, E_n, I_n, alpha))), rel=1e-12)
    assert y == pytest.approx(math.log(trade), rel=1e-15)


def test_symmetry_examples():
    assert symmetry_check(obs(10, 3, 3, 10), 0.5) <= 1e-12
    assert symmetry_check(obs(2e11, 3e11, 5e12, 1e12), 0.5) <= 1e-12


def test_symmetry_sweep():
    rng = np.random.default_rng(1)
    vals = rng.uniform(1e6, 1e13, (1000, 4))
    a = rng.uniform(0.05, 2.0, 1000)
    assert max(symmetry_check(obs(*v), float(al)) for v, al in zip(vals, a)) <= 1e-12


@given(usd, usd, usd, usd, st.floats(10, 2e4), alphas, st.floats(0.0, 3.0))
def test_swap_leaves_trade_unchanged(E_m, I_m, E_n, I_n, R, alpha, beta):
    p = ModelParams(alpha, beta, 1.3)
    assert trade_value(E_m, I_m, E_n, I_n, R, p) == trade_value(E_n, I_n, E_m, I_m, R, p)


@given(usd, usd, usd, usd, st.floats(10, 2e4), st.floats(0.05, 1.2), st.floats(0.0, 3.0), st.floats(1e-3, 1e3))
def test_inversion_consistency(E_m, I_m, E_n, I_n, R, alpha, beta, omega):
    t = trade_value(E_m, I_m, E_n, I_n, R, ModelParams(alpha, beta, omega))
    inter = math.exp(log_interaction(E_m, I_m, E_n, I_n, alpha))
    assert t * omega * R**beta == pytest.approx(inter, rel=1e-12)
    assert invert_dielectric(E_m, I_m, E_n, I_n, t, R, alpha, beta) == pytest.approx(omega, rel=1e-12)


def test_monotone_in_alpha():
    grid = np.linspace(0.05, 2.0, 60)
    big = [interaction_term(obs(5, 3, 4, 6), a) for a in grid]
    small = [interaction_term(obs(0.5, 0.3, 0.4, 0.6), a) for a in grid]
    assert np.all(np.diff(big) > 0)
    assert np.all(np.diff(small) < 0)


def test_invert_examples():
    assert invert_dielectric(1, 1, 1, 1, 2.0, 1.0, 0.5, 1.7) == pytest.approx(1.0, rel=1e-15)
    assert invert_dielectric(1, 1, 1, 1, 0.0, 500.0, 0.5, 1.7) == math.inf
    with pytest.raises(ModelError):
        invert_dielectric(1, 1, 1, 1, -1.0, 500.0, 0.5, 1.7)
    with pytest.raises(ModelError):
        invert_dielectric(-1, 1, 1, 1, 1.0, 500.0, 0.5, 1.7)


def test_recover_known_omega_from_forward_model():
    rng = np.random.default_rng(4)
    for _ in range(20):
        E_m, I_m, E_n, I_n = rng.uniform(1e10, 1e12, 4)
        t = trade_value(E_m, I_m, E_n, I_n, 1200.0, ModelParams(0.47, 1.7, 3.5))
        o = obs(E_m, I_m, E_n, I_n, t)
        assert observation_dielectric(o, 1200.0, 0.47, 1.7) == pytest.approx(3.5, rel=1e-9)
