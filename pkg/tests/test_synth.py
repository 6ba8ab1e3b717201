import filecmp

import numpy as np
import pytest

from coulomb_trade.dataset import load_bundle
from coulomb_trade.estimation import fit_alpha
from coulomb_trade.model_core import observation_dielectric
from coulomb_trade.synth import REST_OF_WORLD, SynthConfig, SynthError, generate, generate_synthetic
from conftest import synth_dataset


def test_needs_two_countries():
    with pytest.raises(SynthError):
        generate(SynthConfig(n_countries=1))


def test_same_seed_byte_identical(tmp_path):
    cfg = SynthConfig(n_countries=5, noise_sigma=0.05, rng_seed=42)
    generate_synthetic(cfg, tmp_path / "a")
    generate_synthetic(cfg, tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    assert mismatch == [] and errors == [] and len(match) == 5


def test_different_seed_differs(tmp_path):
    generate_synthetic(SynthConfig(rng_seed=1), tmp_path / "a")
    generate_synthetic(SynthConfig(rng_seed=2), tmp_path / "b")
    assert (tmp_path / "a" / "flows.csv").read_bytes() != (tmp_path / "b" / "flows.csv").read_bytes()


def test_totals_follow_gdp_power_law():
    cfg = SynthConfig(n_countries=6, noise_sigma=0.1, rng_seed=3)
    ds, _ = synth_dataset(**vars(cfg))
    u = cfg.gdp_unit
    for (c, y), row in ds.panel.rows.items():
        g = ds.gdp[(c, y)]
        e = u * cfg.k_prime * (g / u) ** cfg.rho
        assert row.total_exports == pytest.approx(e, rel=1e-12)
        assert row.total_imports == pytest.approx(cfg.k_double_prime * e, rel=1e-12)


def test_flows_mirror_and_rest_of_world():
    ds, _ = synth_dataset(n_countries=4, noise_sigma=0.05, rng_seed=8)
    assert max(g for *_, g in ds.flows.mirror_discrepancies()) == 0.0
    assert REST_OF_WORLD not in ds.countries()
    assert all(ds.flows.get(c, REST_OF_WORLD, 2015).export_value > 0 for c in ds.countries())


def test_zero_noise_recovers_alpha_on_every_pair():
    for seed in range(3):
        ds, _ = synth_dataset(n_countries=5, alpha=0.62, rng_seed=seed)
        for pair in ds.pairs():
            assert fit_alpha(ds.pair_observations(*pair)).alpha == pytest.approx(0.62, abs=1e-3)


def test_per_pair_omega_table_recovered():
    codes = ["XAA", "XAB", "XAC"]
    omegas = {("XAA", "XAB"): 1e-5, ("XAA", "XAC"): 3e-5, ("XAB", "XAC"): 7.5e-5}
    ds, info = synth_dataset(n_countries=3, alpha=0.5, beta=1.7, omega=omegas, rng_seed=4)
    assert info["omega"] is None
    for (a, b), w in omegas.items():
        for o in ds.pair_observations(a, b):
            assert observation_dielectric(o, ds.distance(a, b), 0.5, 1.7) == pytest.approx(w, rel=1e-9)
    assert sorted(ds.countries()) == codes


def test_infeasible_omega():
    with pytest.raises(SynthError, match="infeasible"):
        generate(SynthConfig(omega=1e-12))
    with pytest.raises(SynthError):
        generate(SynthConfig(omega={("XAA", "XAB"): 1.0}, n_countries=3))


def test_bundle_reload_and_hash_check(tmp_path):
    generate_synthetic(SynthConfig(rng_seed=5), tmp_path)
    ds = load_bundle(tmp_path)
    assert ds.manifest["synthetic"]["config"]["rng_seed"] == 5
    assert ds.manifest["files"]["flows.csv"]["rows"] == len(ds.flows)
    flows = tmp_path / "flows.csv"
    flows.write_text(flows.read_text().replace("2019", "2018", 1))
    with pytest.raises(ValueError, match="hash"):
        load_bundle(tmp_path)
