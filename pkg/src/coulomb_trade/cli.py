"""Command-line driver: ingest -> fit -> compose -> predict -> report.

Reports are JSON (schema-versioned, 17 significant digits); plot series
are TSV. Hard errors (bad files, bad flags) exit with status 2. A pair or
country that cannot be fitted in a batch is recorded under ``warnings`` and
the command still exits 0.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .dataset import Dataset, load_bundle, sha256_file, write_bundle
from .estimation import (
    ALPHA_BRACKET,
    FitError,
    LinearityFit,
    OlsFit,
    PairFit,
    PowerLawFit,
    TripleFit,
    alpha_distribution,
    beta_from_intercept,
    beta_points,
    cdf_residuals,
    fit_alpha,
    fit_beta,
    fit_linearity,
    fit_rho,
)
from .model_core import ModelError, log_form
from .predict import (
    COULOMB_BETA,
    DEFAULT_BETA,
    ComposedModel,
    PairYear,
    PredictError,
    aggregate_rho,
    calibrate_prefactor,
    compose,
    predict_trade,
    residual_omega,
)
from .serialize import dumps, tsv_text, write_json
from .synth import SynthConfig, SynthError, generate_synthetic
from .trade_data import (
    DataError,
    distance,
    load_capitals,
    load_distances,
    load_flows,
    load_gdp,
    normalize,
)

REPORT_SCHEMA_VERSION = 1
DEFAULT_YEARS = (2009, 2019)

NOTES = [
    "omega is treated as constant per pair over the fitted years",
    "alpha is the value that makes the log-log slope exactly one (bisection)",
    "beta assumes both pairs share the same omega; intercept = beta * ln(R_den / R_num)",
    "alpha summary uses the arithmetic mean and the population (divisor N) standard deviation",
    "trade for pair m-n is m's exports to n plus m's imports from n, read from m's rows",
    "values are nominal USD; missing years are skipped, never interpolated",
]

EXIT_ERROR = 2


class UsageError(Exception):
    pass


# --- argument helpers ------------------------------------------------------


def parse_years(text: str | None) -> tuple[int, int]:
    if text is None:
        return DEFAULT_YEARS
    try:
        a, b = (int(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"--years must look like A:B, got {text!r}") from None
    if b < a:
        raise UsageError(f"--years range {text} is empty")
    return a, b


def parse_pair(text: str) -> tuple[str, str]:
    parts = text.strip().split("-")
    if len(parts) != 2 or not all(len(p) == 3 and p.isupper() for p in parts):
        raise UsageError(f"pair must look like USA-CAN, got {text!r}")
    if parts[0] == parts[1]:
        raise UsageError(f"pair {text} repeats a country")
    return parts[0], parts[1]


def parse_pairs(text: str, ds: Dataset) -> list[tuple[str, str]]:
    if text == "all":
        return ds.pairs()
    return [parse_pair(p) for p in text.split(",") if p.strip()]


def parse_countries(text: str, ds: Dataset) -> list[str]:
    if text == "all":
        return ds.countries()
    return [c.strip() for c in text.split(",") if c.strip()]


def year_list(years: tuple[int, int]) -> list[int]:
    return list(range(years[0], years[1] + 1))


def pair_label(pair) -> str:
    return f"{pair[0]}-{pair[1]}"


# --- dict conversion -------------------------------------------------------


def ols_dict(fit: OlsFit) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
    }


def pair_fit_dict(f: PairFit) -> dict:
    return {
        "pair": pair_label(f.pair),
        "alpha": f.alpha,
        "converged": f.converged,
        "fit": ols_dict(f.fit),
        "years_used": list(f.years_used),
    }


def triple_fit_dict(t: TripleFit, alpha_num: float, alpha_den: float, r_num: float, r_den: float) -> dict:
    return {
        "numerator_pair": pair_label(t.numerator_pair),
        "denominator_pair": pair_label(t.denominator_pair),
        "beta": t.beta,
        "fit": ols_dict(t.fit),
        "distance_ratio": t.distance_ratio,
        "alpha_num": alpha_num,
        "alpha_den": alpha_den,
        "r_num_km": r_num,
        "r_den_km": r_den,
        "years_used": list(t.years_used),
        "assumption": "both pairs share the same omega",
    }


def power_law_dict(f: PowerLawFit) -> dict:
    return {
        "country": f.country,
        "rho": f.rho,
        "k_prime": f.k_prime,
        "fit": ols_dict(f.fit),
        "years_used": list(f.years_used),
    }


def linearity_dict(f: LinearityFit) -> dict:
    return {
        "country": f.country,
        "slope": f.slope,
        "r_squared": f.r_squared,
        "years_used": list(f.years_used),
    }


def model_dict(m: ComposedModel) -> dict:
    return {
        "alpha_rho_m": m.alpha_rho_m,
        "alpha_rho_n": m.alpha_rho_n,
        "beta": m.beta,
        "prefactor": m.prefactor,
    }


def envelope(command: str, body: dict, ds_path: str | None = None) -> dict:
    meta: dict = {"tool": "coulomb-trade", "version": __version__, "notes": NOTES}
    if ds_path is not None:
        manifest = Path(ds_path) / "manifest.json"
        meta["dataset"] = {
            "path": str(ds_path),
            "manifest_sha256": sha256_file(manifest) if manifest.exists() else None,
        }
    return {"schema_version": REPORT_SCHEMA_VERSION, "command": command, "metadata": meta, **body}


# --- command bodies (return report dict plus named TSV texts) ---------------


def run_fit_alpha(ds: Dataset, pairs, years) -> tuple[dict, dict[str, str]]:
    fits, warnings, tsvs = [], [], {}
    for pair in pairs:
        obs = ds.pair_observations(*pair, years=year_list(years))
        try:
            f = fit_alpha(obs, pair)
        except (FitError, ModelError) as exc:
            warnings.append({"pair": pair_label(pair), "error": str(exc)})
            continue
        fits.append(f)
        rows = []
        for o in obs:
            x, y = log_form(o, f.alpha)
            rows.append((o.year, x, y, float(f.fit.predict(x))))
        tsvs[f"alpha_{pair_label(pair)}.tsv"] = tsv_text(("year", "x", "y", "fitted_y"), rows)
    body = {
        "pair_fits": [pair_fit_dict(f) for f in fits],
        "alpha_bracket": list(ALPHA_BRACKET),
        "warnings": warnings,
    }
    return body, tsvs


def _alphas_for(ds, num, den, years, explicit):
    if explicit is not None:
        return explicit
    out = []
    for pair in (num, den):
        out.append(fit_alpha(ds.pair_observations(*pair, years=year_list(years)), pair).alpha)
    return tuple(out)


def run_fit_beta(ds: Dataset, num, den, years, alphas=None) -> tuple[dict, dict[str, str]]:
    a_num, a_den = _alphas_for(ds, num, den, years, alphas)
    r_num, r_den = ds.distance(*num), ds.distance(*den)
    ys = year_list(years)
    s_num, s_den = ds.pair_observations(*num, years=ys), ds.pair_observations(*den, years=ys)
    t = fit_beta(s_num, s_den, a_num, a_den, r_num, r_den, num, den)
    rows = [(y, x, yy, float(t.fit.predict(x))) for y, x, yy in beta_points(s_num, s_den, a_num, a_den)]
    tsv = tsv_text(("year", "x_prime", "y_prime", "fitted_y"), rows)
    body = {"triple_fits": [triple_fit_dict(t, a_num, a_den, r_num, r_den)]}
    return body, {f"beta_{pair_label(num)}_{pair_label(den)}.tsv": tsv}


def read_alpha_samples(paths) -> list[float]:
    samples: list[float] = []
    for p in paths:
        p = Path(p)
        if p.suffix == ".json":
            data = json.loads(p.read_text(encoding="utf-8"))
            samples += [f["alpha"] for f in data.get("pair_fits", []) if f.get("converged", True)]
        else:
            with p.open(newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                if "alpha" not in (reader.fieldnames or []):
                    raise DataError(f"{p}: no 'alpha' column")
                for row in reader:
                    try:
                        samples.append(float(row["alpha"]))
                    except ValueError:
                        raise DataError(f"{p}:{reader.line_num}: bad alpha {row['alpha']!r}") from None
    return samples


def run_alpha_dist(samples) -> tuple[dict, dict[str, str]]:
    dist = alpha_distribution(samples)
    rows = cdf_residuals(samples, dist)
    body = {
        "alpha_distribution": {
            "mu": dist.mu,
            "sigma": dist.sigma,
            "n": len(dist.samples),
            "max_abs_cdf_difference": max(abs(r[3]) for r in rows),
        }
    }
    tsv = tsv_text(("alpha", "empirical_cdf", "model_cdf", "difference"), rows)
    return body, {"alpha_cdf.tsv": tsv}


def _window(series: dict[int, float], years) -> dict[int, float]:
    return {y: v for y, v in series.items() if years[0] <= y <= years[1]}


def run_fit_rho(ds: Dataset, countries, years) -> tuple[dict, dict[str, str]]:
    fits, warnings, tsvs = [], [], {}
    for c in countries:
        try:
            gdp = _window(ds.panel.series(c, "gdp"), years)
            exports = _window(ds.panel.series(c, "total_exports"), years)
            if not gdp:
                raise FitError(f"no GDP for {c} in {years[0]}:{years[1]}")
            shared = sorted(set(gdp) & set(exports))
            e_n = normalize({y: exports[y] for y in shared}) if shared else normalize(exports)
            g_n = normalize({y: gdp[y] for y in shared}) if shared else normalize(gdp)
            f = fit_rho(e_n, g_n, c)
        except (FitError, DataError) as exc:
            warnings.append({"country": c, "error": str(exc)})
            continue
        fits.append(f)
        rows = []
        for y in f.years_used:
            lx, ly = math.log(g_n.values[y]), math.log(e_n.values[y])
            rows.append((y, lx, ly, float(f.fit.predict(lx))))
        tsvs[f"rho_{c}.tsv"] = tsv_text(("year", "ln_gdp_norm", "ln_exports_norm", "fitted_y"), rows)
    return {"power_law_fits": [power_law_dict(f) for f in fits], "warnings": warnings}, tsvs


def run_fit_linearity(ds: Dataset, countries, years) -> tuple[dict, dict[str, str]]:
    fits, warnings, tsvs = [], [], {}
    for c in countries:
        try:
            exports = _window(ds.panel.series(c, "total_exports"), years)
            imports = _window(ds.panel.series(c, "total_imports"), years)
            if not exports:
                raise FitError(f"no trade totals for {c} in {years[0]}:{years[1]}")
            e_n, i_n = normalize(exports), normalize(imports)
            f = fit_linearity(i_n, e_n, c)
        except (FitError, DataError) as exc:
            warnings.append({"country": c, "error": str(exc)})
            continue
        fits.append(f)
        rows = [(y, e_n.values[y], i_n.values[y], f.slope * e_n.values[y]) for y in f.years_used]
        tsvs[f"linearity_{c}.tsv"] = tsv_text(("year", "exports_norm", "imports_norm", "fitted_y"), rows)
    return {"linearity_fits": [linearity_dict(f) for f in fits], "warnings": warnings}, tsvs


def pair_years(ds: Dataset, pair, years) -> list[PairYear]:
    m, n = pair
    rows = []
    for y in year_list(years):
        trade = ds.flows.trade(m, n, y)
        gm, gn = ds.gdp.get((m, y)), ds.gdp.get((n, y))
        if trade is None or gm is None or gn is None:
            continue
        rows.append(PairYear(y, gm, gn, trade))
    return rows


def run_predict(model: ComposedModel, rows: list[PairYear], R: float, calibrate_year=None, omega=1.0):
    if calibrate_year is not None:
        ref = [r for r in rows if r.year == calibrate_year]
        if not ref:
            raise UsageError(f"calibration year {calibrate_year} not in the data")
        model = calibrate_prefactor(model, ref[0], R)
    omegas = residual_omega(rows, R, model)
    out = []
    for r in rows:
        out.append(
            {
                "year": r.year,
                "gdp_m": r.G_m,
                "gdp_n": r.G_n,
                "observed": r.trade,
                "predicted": predict_trade(model, r.G_m, r.G_n, R, omega),
                "residual_omega": omegas[r.year],
            }
        )
    return {"model": model_dict(model), "distance_km": R, "omega": omega, "predictions": out}


def build_model(args, rho_m=None, rho_n=None, alpha=None, beta=None) -> ComposedModel:
    alpha = args.alpha if args.alpha is not None else alpha
    if alpha is None:
        raise UsageError("--alpha is required")
    rho_m = args.rho_m if args.rho_m is not None else (args.rho if args.rho is not None else rho_m)
    rho_n = args.rho_n if args.rho_n is not None else (args.rho if args.rho is not None else rho_n)
    if rho_m is None or rho_n is None:
        raise UsageError("--rho (or --rho-m and --rho-n) is required")
    if args.beta_mode == "coulomb2":
        beta = COULOMB_BETA
    elif args.beta is not None:
        beta = args.beta
    elif beta is None:
        beta = DEFAULT_BETA
    model = compose(alpha, rho_m, rho_n, beta, args.k_prime, args.k_double_prime)
    if args.prefactor is not None:
        model = ComposedModel(model.alpha_rho_m, model.alpha_rho_n, model.beta, args.prefactor)
    return model


# --- command handlers ------------------------------------------------------


def _emit(args, report: dict, tsvs: dict[str, str], stem: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(report, out / f"{stem}.json")
        for name, text in tsvs.items():
            (out / name).write_text(text, encoding="utf-8")
    if args.format == "tsv" and tsvs:
        for name, text in tsvs.items():
            if len(tsvs) > 1:
                sys.stdout.write(f"# {name}\n")
            sys.stdout.write(text)
    elif not args.out:
        sys.stdout.write(dumps(report))
    if report.get("warnings"):
        print(f"warning: {len(report['warnings'])} item(s) could not be fitted", file=sys.stderr)


def cmd_ingest(args) -> int:
    flows = load_flows(args.flows)
    if args.strict:
        flows.check_mirrors()
    gdp = load_gdp(args.gdp) if args.gdp else {}
    distances = load_distances(args.distances)
    capitals = load_capitals(args.capitals) if args.capitals else None
    if not args.out:
        raise UsageError("ingest needs --out DIR")
    manifest = write_bundle(args.out, flows, gdp, distances, capitals)
    sys.stdout.write(dumps(manifest["summary"]))
    return 0


def cmd_synth(args) -> int:
    if not args.out:
        raise UsageError("synth needs --out DIR")
    cfg = SynthConfig(
        n_countries=args.countries,
        years=parse_years(args.years),
        alpha=args.alpha,
        beta=args.beta,
        omega=args.omega,
        rho=args.rho,
        k_prime=args.k_prime,
        k_double_prime=args.k_double_prime,
        noise_sigma=args.noise,
        rng_seed=args.seed,
    )
    manifest = generate_synthetic(cfg, args.out)
    sys.stdout.write(dumps(manifest["summary"]))
    return 0


def cmd_fit_alpha(args) -> int:
    ds = load_bundle(args.dataset)
    body, tsvs = run_fit_alpha(ds, parse_pairs(args.pairs, ds), parse_years(args.years))
    _emit(args, envelope("fit-alpha", body, args.dataset), tsvs, "fit_alpha")
    return 0


def cmd_fit_beta(args) -> int:
    num, den = parse_pair(args.num), parse_pair(args.den)
    alphas = None
    if args.alphas:
        try:
            alphas = tuple(float(a) for a in args.alphas.split(","))
        except ValueError:
            raise UsageError("--alphas must be two numbers: A_NUM,A_DEN") from None
        if len(alphas) != 2:
            raise UsageError("--alphas must be two numbers: A_NUM,A_DEN")
    if args.intercept is not None:
        if not args.distances:
            raise UsageError("--intercept needs --distances")
        table = load_distances(args.distances)
        r_num, r_den = distance(table, *num), distance(table, *den)
        beta = beta_from_intercept(args.intercept, r_num, r_den)
        body = {
            "beta_from_intercept": {
                "numerator_pair": pair_label(num),
                "denominator_pair": pair_label(den),
                "intercept": args.intercept,
                "r_num_km": r_num,
                "r_den_km": r_den,
                "beta": beta,
            }
        }
        _emit(args, envelope("fit-beta", body), {}, "fit_beta")
        return 0
    if not args.dataset:
        raise UsageError("fit-beta needs --dataset (or --intercept with --distances)")
    ds = load_bundle(args.dataset)
    body, tsvs = run_fit_beta(ds, num, den, parse_years(args.years), alphas)
    _emit(args, envelope("fit-beta", body, args.dataset), tsvs, "fit_beta")
    return 0


def cmd_alpha_dist(args) -> int:
    samples = read_alpha_samples(args.inputs)
    body, tsvs = run_alpha_dist(samples)
    _emit(args, envelope("alpha-dist", body), tsvs, "alpha_dist")
    return 0


def cmd_fit_rho(args) -> int:
    ds = load_bundle(args.dataset)
    body, tsvs = run_fit_rho(ds, parse_countries(args.countries, ds), parse_years(args.years))
    _emit(args, envelope("fit-rho", body, args.dataset), tsvs, "fit_rho")
    return 0


def cmd_fit_linearity(args) -> int:
    ds = load_bundle(args.dataset)
    body, tsvs = run_fit_linearity(ds, parse_countries(args.countries, ds), parse_years(args.years))
    _emit(args, envelope("fit-linearity", body, args.dataset), tsvs, "fit_linearity")
    return 0


def cmd_predict(args) -> int:
    model = build_model(args)
    tsvs = {}
    if args.dataset:
        if not args.pair:
            raise UsageError("predict with --dataset needs --pair")
        ds = load_bundle(args.dataset)
        pair = parse_pair(args.pair)
        rows = pair_years(ds, pair, parse_years(args.years))
        R = ds.distance(*pair)
        body = run_predict(model, rows, R, args.calibrate_year, args.omega)
        body["pair"] = pair_label(pair)
        series = [
            (r["year"], r["observed"], r["predicted"], r["residual_omega"]) for r in body["predictions"]
        ]
        tsvs[f"omega_{body['pair']}.tsv"] = tsv_text(
            ("year", "observed", "predicted", "residual_omega"), series
        )
    else:
        if args.gdp_m is None or args.gdp_n is None or args.distance is None:
            raise UsageError("predict needs --dataset/--pair or --gdp-m, --gdp-n and --distance")
        body = {
            "model": model_dict(model),
            "prediction": predict_trade(model, args.gdp_m, args.gdp_n, args.distance, args.omega),
        }
    _emit(args, envelope("predict", body, args.dataset), tsvs, "predict")
    return 0


def cmd_report(args) -> int:
    ds = load_bundle(args.dataset)
    years = parse_years(args.years)
    pairs = parse_pairs(args.pairs, ds)
    alpha_body, tsvs = run_fit_alpha(ds, pairs, years)
    warnings = list(alpha_body["warnings"])
    report: dict = {"pair_fits": alpha_body["pair_fits"]}

    alphas = [f["alpha"] for f in alpha_body["pair_fits"] if f["converged"]]
    if len(alphas) >= 2:
        dist_body, dist_tsv = run_alpha_dist(alphas)
        report.update(dist_body)
        tsvs.update(dist_tsv)
    else:
        report["alpha_distribution"] = None

    report["triple_fits"] = []
    fitted = {f["pair"]: f["alpha"] for f in alpha_body["pair_fits"]}
    if args.beta_num and args.beta_den:
        num, den = parse_pair(args.beta_num), parse_pair(args.beta_den)
        given = None
        if pair_label(num) in fitted and pair_label(den) in fitted:
            given = (fitted[pair_label(num)], fitted[pair_label(den)])
        try:
            b_body, b_tsv = run_fit_beta(ds, num, den, years, given)
            report["triple_fits"] = b_body["triple_fits"]
            tsvs.update(b_tsv)
        except (FitError, DataError, ModelError) as exc:
            warnings.append({"triple": f"{pair_label(num)}/{pair_label(den)}", "error": str(exc)})

    countries = ds.countries()
    rho_body, rho_tsv = run_fit_rho(ds, countries, years)
    lin_body, lin_tsv = run_fit_linearity(ds, countries, years)
    report["power_law_fits"] = rho_body["power_law_fits"]
    report["linearity_fits"] = lin_body["linearity_fits"]
    warnings += rho_body["warnings"] + lin_body["warnings"]
    tsvs.update(rho_tsv)
    tsvs.update(lin_tsv)

    composed = None
    rhos = [f["rho"] for f in report["power_law_fits"]]
    if alphas and rhos:
        rho = aggregate_rho(rhos, args.rho_rule)
        alpha = sum(alphas) / len(alphas)
        if args.beta_mode == "coulomb2":
            beta = COULOMB_BETA
        elif report["triple_fits"]:
            beta = report["triple_fits"][0]["beta"]
        else:
            beta = DEFAULT_BETA
        k_p = aggregate_rho([f["k_prime"] for f in report["power_law_fits"]], args.rho_rule)
        slopes = [f["slope"] for f in report["linearity_fits"]]
        k_pp = aggregate_rho(slopes, args.rho_rule) if slopes else 1.0
        composed = {
            "alpha": alpha,
            "rho": rho,
            "rho_rule": args.rho_rule,
            "beta_mode": args.beta_mode,
            **model_dict(compose(alpha, rho, rho, beta, k_p, k_pp)),
        }
    report["composed_model"] = composed
    report["warnings"] = warnings
    _emit(args, envelope("report", report, args.dataset), tsvs, "report")
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coulomb-trade", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, dataset=True):
        if dataset:
            sp.add_argument("--dataset", help="dataset bundle directory")
        sp.add_argument("--years", help="inclusive year window A:B (default 2009:2019)")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--format", choices=("json", "tsv"), default="json")

    sp = sub.add_parser("ingest", help="validate CSVs and write a dataset bundle")
    sp.add_argument("--flows", required=True)
    sp.add_argument("--gdp")
    sp.add_argument("--distances", required=True)
    sp.add_argument("--capitals")
    sp.add_argument("--strict", action="store_true", help="reject mirror gaps above 20%%")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("synth", help="generate a synthetic dataset bundle")
    sp.add_argument("--out")
    sp.add_argument("--years")
    sp.add_argument("--countries", type=int, default=4)
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--beta", type=float, default=1.7)
    sp.add_argument("--omega", type=float, help="constant omega (default: chosen automatically)")
    sp.add_argument("--rho", type=float, default=1.33)
    sp.add_argument("--k-prime", type=float, default=0.25)
    sp.add_argument("--k-double-prime", type=float, default=1.0)
    sp.add_argument("--noise", type=float, default=0.0, help="lognormal noise sigma on flows")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("fit-alpha", help="slope-one alpha per pair")
    common(sp)
    sp.add_argument("--pairs", default="all", help="comma list like USA-CAN,USA-MEX or 'all'")
    sp.set_defaults(func=cmd_fit_alpha)

    sp = sub.add_parser("fit-beta", help="distance exponent from a trade-ratio regression")
    common(sp)
    sp.add_argument("--num", required=True, help="numerator pair, e.g. USA-CAN")
    sp.add_argument("--den", required=True, help="denominator pair, e.g. USA-MEX")
    sp.add_argument("--alphas", help="A_NUM,A_DEN (default: fit each pair)")
    sp.add_argument("--intercept", type=float, help="skip the regression; use this intercept")
    sp.add_argument("--distances", help="distance CSV for --intercept mode")
    sp.set_defaults(func=cmd_fit_beta)

    sp = sub.add_parser("alpha-dist", help="mean, std and CDF residuals of fitted alphas")
    common(sp, dataset=False)
    sp.add_argument("inputs", nargs="+", help="fit-alpha JSON reports or CSVs with an alpha column")
    sp.set_defaults(func=cmd_alpha_dist)

    for name, func, text in (
        ("fit-rho", cmd_fit_rho, "export vs GDP power law per country"),
        ("fit-linearity", cmd_fit_linearity, "import vs export slope per country"),
    ):
        sp = sub.add_parser(name, help=text)
        common(sp)
        sp.add_argument("--countries", default="all", help="comma list of codes or 'all'")
        sp.set_defaults(func=func)

    sp = sub.add_parser("predict", help="predict trade and residual omega")
    common(sp)
    sp.add_argument("--pair")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--rho-m", type=float)
    sp.add_argument("--rho-n", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--beta-mode", choices=("fitted", "coulomb2"), default="fitted")
    sp.add_argument("--k-prime", type=float, default=1.0)
    sp.add_argument("--k-double-prime", type=float, default=1.0)
    sp.add_argument("--prefactor", type=float, help="override K directly")
    sp.add_argument("--calibrate-year", type=int, help="fit K so this year has omega = 1")
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--gdp-m", type=float)
    sp.add_argument("--gdp-n", type=float)
    sp.add_argument("--distance", type=float, help="km")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("report", help="run every fit and write one report")
    common(sp)
    sp.add_argument("--pairs", default="all")
    sp.add_argument("--beta-num")
    sp.add_argument("--beta-den")
    sp.add_argument("--beta-mode", choices=("fitted", "coulomb2"), default="fitted")
    sp.add_argument("--rho-rule", choices=("mean", "median"), default="mean")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "dataset", None) is None and args.command in ("fit-alpha", "fit-rho", "fit-linearity", "report"):
        parser.error(f"{args.command} needs --dataset")
    try:
        return args.func(args)
    except (UsageError, DataError, FitError, ModelError, PredictError, SynthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
