"""On-disk dataset bundle: the canonical CSVs plus a JSON manifest."""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .model_core import PairObservation
from .serialize import dumps
from .trade_data import (
    CapitalTable,
    CountryPanel,
    DataError,
    DistanceTable,
    FlowPanel,
    aggregate_totals,
    load_capitals,
    load_distances,
    load_flows,
    load_gdp,
    resolve_distance,
    write_capitals,
    write_distances,
    write_flows,
    write_gdp,
)

SCHEMA_VERSION = 1
FLOWS_FILE = "flows.csv"
GDP_FILE = "gdp.csv"
DISTANCES_FILE = "distances.csv"
CAPITALS_FILE = "capitals.csv"
MANIFEST_FILE = "manifest.json"


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _row_count(path: Path) -> int:
    with path.open(encoding="utf-8") as fh:
        return sum(1 for line in fh if line.strip()) - 1


@dataclass(frozen=True)
class Dataset:
    flows: FlowPanel
    gdp: Mapping[tuple[str, int], float]
    distances: DistanceTable
    capitals: CapitalTable | None = None
    manifest: Mapping = field(default_factory=dict)

    @property
    def panel(self) -> CountryPanel:
        # cached on first use; frozen dataclass so go through __dict__
        cached = self.__dict__.get("_panel")
        if cached is None:
            cached = aggregate_totals(self.flows, self.gdp)
            self.__dict__["_panel"] = cached
        return cached

    def countries(self) -> list[str]:
        return self.flows.reporters()

    def years(self) -> list[int]:
        return self.flows.years()

    def distance(self, a: str, b: str) -> float:
        return resolve_distance(self.distances, self.capitals, a, b)

    def pairs(self) -> list[tuple[str, str]]:
        """Every unordered pair of reporting countries, first code as reporter."""
        cs = self.countries()
        return [(a, b) for i, a in enumerate(cs) for b in cs[i + 1:]]

    def pair_observations(
        self, m: str, n: str, years: Iterable[int] | None = None
    ) -> list[PairObservation]:
        """Usable observations for pair (m, n), trade read from m's rows.

        Years with a missing row, missing totals or any zero value are
        skipped rather than imputed.
        """
        panel = self.panel
        wanted = sorted(years) if years is not None else self.years()
        out = []
        for year in wanted:
            trade = self.flows.trade(m, n, year)
            a, b = panel.get(m, year), panel.get(n, year)
            if trade is None or a is None or b is None:
                continue
            values = (a.total_exports, a.total_imports, b.total_exports, b.total_imports, trade)
            if min(values) <= 0:
                continue
            out.append(PairObservation(year, *values))
        return out


def summarize(flows: FlowPanel, gdp: Mapping[tuple[str, int], float]) -> dict:
    gaps = [g for *_, g in flows.mirror_discrepancies()]
    return {
        "countries": flows.reporters(),
        "partners": sorted({k[1] for k in flows.records}),
        "years": flows.years(),
        "gdp_countries": sorted({c for c, _ in gdp}),
        "mirror": {
            "mirrored_pair_years": len(gaps),
            "max_relative_gap": max(gaps) if gaps else 0.0,
            "over_20_percent": sum(1 for g in gaps if g > 0.20),
        },
    }


def write_bundle(
    directory: str | Path,
    flows: FlowPanel,
    gdp: Mapping[tuple[str, int], float],
    distances: DistanceTable,
    capitals: CapitalTable | None = None,
    extra: Mapping | None = None,
) -> dict:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    write_flows(flows, out / FLOWS_FILE)
    write_gdp(gdp, out / GDP_FILE)
    write_distances(distances, out / DISTANCES_FILE)
    names = [FLOWS_FILE, GDP_FILE, DISTANCES_FILE]
    if capitals is not None:
        write_capitals(capitals, out / CAPITALS_FILE)
        names.append(CAPITALS_FILE)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "files": {
            name: {"rows": _row_count(out / name), "sha256": sha256_file(out / name)}
            for name in names
        },
        "summary": summarize(flows, gdp),
    }
    if extra:
        manifest.update(extra)
    (out / MANIFEST_FILE).write_text(dumps(manifest), encoding="utf-8")
    return manifest


def load_bundle(directory: str | Path) -> Dataset:
    import json

    d = Path(directory)
    manifest_path = d / MANIFEST_FILE
    if not manifest_path.exists():
        raise DataError(f"{d}: not a dataset bundle (missing {MANIFEST_FILE})")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"{manifest_path}: unsupported schema version {manifest.get('schema_version')!r}")
    for name, info in manifest.get("files", {}).items():
        if sha256_file(d / name) != info.get("sha256"):
            raise DataError(f"{d / name}: content hash does not match manifest")
    capitals = load_capitals(d / CAPITALS_FILE) if (d / CAPITALS_FILE).exists() else None
    return Dataset(
        flows=load_flows(d / FLOWS_FILE),
        gdp=load_gdp(d / GDP_FILE),
        distances=load_distances(d / DISTANCES_FILE),
        capitals=capitals,
        manifest=manifest,
    )
