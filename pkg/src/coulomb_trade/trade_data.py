"""Trade panels: CSV ingestion, country totals, normalization and distances.

CSV layouts (UTF-8, comma separated, one record per line, no thousands
separators):

    flows      year,reporter,partner,export_usd,import_usd
    gdp        year,country,gdp_usd
    distances  country_a,country_b,km
    capitals   country,lat,lon

Values are nominal USD exactly as exported by WITS. Nothing is deflated or
imputed; a missing year is simply absent.
"""

from __future__ import annotations

import csv
import math
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

EARTH_RADIUS_KM = 6371.0
MIRROR_TOLERANCE = 0.20

FLOW_HEADER = ("year", "reporter", "partner", "export_usd", "import_usd")
GDP_HEADER = ("year", "country", "gdp_usd")
DISTANCE_HEADER = ("country_a", "country_b", "km")
CAPITALS_HEADER = ("country", "lat", "lon")

_CODE_RE = re.compile(r"^[A-Z]{3}$")


class DataError(ValueError):
    """Raised for malformed input files or inconsistent panels."""


def country_id(code: str) -> str:
    if not isinstance(code, str) or not _CODE_RE.match(code):
        raise DataError(f"invalid country code {code!r}: expected 3 uppercase letters")
    return code


def year_value(value: int | str) -> int:
    if isinstance(value, str):
        if not value.strip().isdigit():
            raise DataError(f"invalid year {value!r}")
        value = int(value)
    if not 1900 <= value <= 2100:
        raise DataError(f"year {value} outside 1900..2100")
    return int(value)


def _usd(text: str) -> float:
    v = float(text)
    if not math.isfinite(v) or v < 0:
        raise ValueError(f"value must be finite and non-negative, got {text!r}")
    return v


def pair_key(a: str, b: str) -> tuple[str, str]:
    """Unordered pair key; both orientations map to the same tuple."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class FlowRecord:
    export_value: float
    import_value: float


@dataclass(frozen=True)
class FlowPanel:
    """Directed bilateral flows keyed by ``(reporter, partner, year)``.

    ``export_value`` is the reporter's export to the partner and
    ``import_value`` the reporter's import from the partner.
    """

    records: Mapping[tuple[str, str, int], FlowRecord]

    def __post_init__(self):
        for (rep, par, year), rec in self.records.items():
            if rep == par:
                raise DataError(f"self-flow record for {rep} in {year}")
            for v in (rec.export_value, rec.import_value):
                if not math.isfinite(v) or v < 0:
                    raise DataError(f"bad flow value {v!r} for {rep}->{par} {year}")
        object.__setattr__(self, "records", MappingProxyType(dict(self.records)))

    def __len__(self) -> int:
        return len(self.records)

    def reporters(self) -> list[str]:
        return sorted({k[0] for k in self.records})

    def years(self) -> list[int]:
        return sorted({k[2] for k in self.records})

    def get(self, reporter: str, partner: str, year: int) -> FlowRecord | None:
        return self.records.get((reporter, partner, year))

    def trade(self, reporter: str, partner: str, year: int) -> float | None:
        """Bilateral trade volume read from the designated reporter's row.

        Trade is the reporter's exports to the partner plus its imports from
        the partner. Returns None when the reporter has no row for that year.
        """
        rec = self.records.get((reporter, partner, year))
        if rec is None:
            return None
        return rec.export_value + rec.import_value

    def mirror_discrepancies(self) -> list[tuple[str, str, int, float]]:
        """Relative gaps between each flow and its mirror-reported counterpart.

        For reporter m and partner n, m's exports are compared with n's imports
        from m, and m's imports with n's exports to m. Only flows reported from
        both sides are included. Each pair/year appears once (m < n).
        """
        out = []
        for (m, n, year), rec in sorted(self.records.items()):
            if m > n:
                continue
            mirror = self.records.get((n, m, year))
            if mirror is None:
                continue
            gap = max(
                _relative_gap(rec.export_value, mirror.import_value),
                _relative_gap(rec.import_value, mirror.export_value),
            )
            out.append((m, n, year, gap))
        return out

    def check_mirrors(self, tolerance: float = MIRROR_TOLERANCE) -> None:
        """Strict mode: reject panels whose mirrored values differ too much."""
        bad = [d for d in self.mirror_discrepancies() if d[3] > tolerance]
        if bad:
            m, n, year, gap = max(bad, key=lambda d: d[3])
            raise DataError(
                f"{len(bad)} mirrored flow(s) differ by more than {tolerance:.0%}; "
                f"worst {m}/{n} {year}: {gap:.1%}"
            )


def _relative_gap(a: float, b: float) -> float:
    hi = max(a, b)
    return 0.0 if hi == 0 else abs(a - b) / hi


@dataclass(frozen=True)
class CountryYear:
    total_exports: float
    total_imports: float
    gdp: float | None = None


@dataclass(frozen=True)
class CountryPanel:
    """Per ``(country, year)`` totals: exports, imports and optional GDP."""

    rows: Mapping[tuple[str, int], CountryYear]

    def __post_init__(self):
        object.__setattr__(self, "rows", MappingProxyType(dict(self.rows)))

    def countries(self) -> list[str]:
        return sorted({c for c, _ in self.rows})

    def years(self, country: str | None = None) -> list[int]:
        return sorted({y for c, y in self.rows if country is None or c == country})

    def get(self, country: str, year: int) -> CountryYear | None:
        return self.rows.get((country, year))

    def series(self, country: str, field: str) -> dict[int, float]:
        """Year -> value for ``total_exports``, ``total_imports`` or ``gdp``.

        Years where the field is missing are dropped.
        """
        out = {}
        for (c, y), row in sorted(self.rows.items()):
            if c != country:
                continue
            v = getattr(row, field)
            if v is not None:
                out[y] = v
        return out


@dataclass(frozen=True)
class DistanceTable:
    entries: Mapping[tuple[str, str], float]

    def __post_init__(self):
        clean: dict[tuple[str, str], float] = {}
        for (a, b), km in self.entries.items():
            if a == b:
                raise DataError(f"distance entry pairs {a} with itself")
            if not (math.isfinite(km) and km > 0):
                raise DataError(f"distance for {a}/{b} must be positive, got {km!r}")
            key = pair_key(a, b)
            if key in clean and clean[key] != km:
                raise DataError(f"conflicting distances for {a}/{b}: {clean[key]} vs {km}")
            clean[key] = float(km)
        object.__setattr__(self, "entries", MappingProxyType(clean))

    def __contains__(self, pair) -> bool:
        return pair_key(*pair) in self.entries


@dataclass(frozen=True)
class Capital:
    lat: float
    lon: float


@dataclass(frozen=True)
class CapitalTable:
    coords: Mapping[str, Capital]

    def __post_init__(self):
        for code, c in self.coords.items():
            if not -90.0 <= c.lat <= 90.0:
                raise DataError(f"latitude out of range for {code}: {c.lat}")
            if not -180.0 <= c.lon <= 180.0:
                raise DataError(f"longitude out of range for {code}: {c.lon}")
        object.__setattr__(self, "coords", MappingProxyType(dict(self.coords)))


@dataclass(frozen=True)
class NormalizedSeries:
    values: Mapping[int, float]
    max_raw: float = field(default=1.0)


# --- ingestion -------------------------------------------------------------


def _read_rows(path: Path, header: tuple[str, ...]):
    """Yield ``(line_number, fields)`` after validating the header."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(h.strip() for h in first) != header:
            raise DataError(f"{path}:1: header must be {','.join(header)}")
        for row in reader:
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}:{reader.line_num}: expected {len(header)} columns, got {len(row)}"
                )
            yield reader.line_num, [f.strip() for f in row]


def load_flows(path: str | Path) -> FlowPanel:
    records: dict[tuple[str, str, int], FlowRecord] = {}
    for line, (yr, rep, par, exp, imp) in _read_rows(path, FLOW_HEADER):
        try:
            key = (country_id(rep), country_id(par), year_value(yr))
            rec = FlowRecord(_usd(exp), _usd(imp))
        except ValueError as exc:
            raise DataError(f"{path}:{line}: {exc}") from None
        if rep == par:
            raise DataError(f"{path}: self-flow at line {line}")
        if key in records:
            raise DataError(f"{path}:{line}: duplicate record {rep}->{par} {yr}")
        records[key] = rec
    return FlowPanel(records)


def load_gdp(path: str | Path) -> dict[tuple[str, int], float]:
    out: dict[tuple[str, int], float] = {}
    for line, (yr, country, gdp) in _read_rows(path, GDP_HEADER):
        try:
            key = (country_id(country), year_value(yr))
            value = _usd(gdp)
        except ValueError as exc:
            raise DataError(f"{path}:{line}: {exc}") from None
        if key in out:
            raise DataError(f"{path}:{line}: duplicate GDP for {country} {yr}")
        out[key] = value
    return out


def load_distances(path: str | Path) -> DistanceTable:
    entries: dict[tuple[str, str], float] = {}
    for line, (a, b, km) in _read_rows(path, DISTANCE_HEADER):
        try:
            a, b = country_id(a), country_id(b)
            value = float(km)
        except ValueError as exc:
            raise DataError(f"{path}:{line}: {exc}") from None
        if a == b or not (math.isfinite(value) and value > 0):
            raise DataError(f"{path}:{line}: distance must be positive between distinct countries")
        key = pair_key(a, b)
        if key in entries and entries[key] != value:
            raise DataError(f"{path}:{line}: conflicting distance for {a}/{b}")
        entries[key] = value
    return DistanceTable(entries)


def load_capitals(path: str | Path) -> CapitalTable:
    coords: dict[str, Capital] = {}
    for line, (code, lat, lon) in _read_rows(path, CAPITALS_HEADER):
        try:
            coords[country_id(code)] = Capital(float(lat), float(lon))
            CapitalTable({code: coords[code]})
        except ValueError as exc:
            raise DataError(f"{path}:{line}: {exc}") from None
    return CapitalTable(coords)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_flows(flows: FlowPanel, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FLOW_HEADER)
        for (rep, par, year), rec in sorted(flows.records.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
            w.writerow([year, rep, par, _fmt(rec.export_value), _fmt(rec.import_value)])


def write_gdp(gdp: Mapping[tuple[str, int], float], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GDP_HEADER)
        for (country, year), v in sorted(gdp.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            w.writerow([year, country, _fmt(v)])


def write_distances(table: DistanceTable, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DISTANCE_HEADER)
        for (a, b), km in sorted(table.entries.items()):
            w.writerow([a, b, _fmt(km)])


def write_capitals(table: CapitalTable, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CAPITALS_HEADER)
        for code, c in sorted(table.coords.items()):
            w.writerow([code, _fmt(c.lat), _fmt(c.lon)])


# --- derived quantities ----------------------------------------------------


def aggregate_totals(
    flows: FlowPanel, gdp: Mapping[tuple[str, int], float] | None = None
) -> CountryPanel:
    """Sum each reporter's flows over all partners, per year.

    Every partner row counts, including partners that never report
    themselves (e.g. a rest-of-world aggregate).
    """
    if len(flows) == 0:
        raise DataError("cannot aggregate an empty flow panel")
    exports: dict[tuple[str, int], float] = {}
    imports: dict[tuple[str, int], float] = {}
    for (rep, _par, year), rec in sorted(flows.records.items()):
        key = (rep, year)
        exports[key] = exports.get(key, 0.0) + rec.export_value
        imports[key] = imports.get(key, 0.0) + rec.import_value
    gdp = gdp or {}
    rows = {key: CountryYear(exports[key], imports[key], gdp.get(key)) for key in exports}
    return CountryPanel(rows)


def normalize(series: Mapping[int, float]) -> NormalizedSeries:
    """Divide a yearly series by its maximum so the largest value is 1."""
    if not series:
        raise DataError("cannot normalize an empty series")
    peak = max(series.values())
    if not (math.isfinite(peak) and peak > 0):
        raise DataError("cannot normalize a series whose maximum is not positive")
    values = {y: v / peak for y, v in sorted(series.items())}
    return NormalizedSeries(MappingProxyType(values), peak)


def distance(table: DistanceTable, a: str, b: str) -> float:
    if a == b:
        raise DataError(f"distance requested between {a} and itself")
    try:
        return table.entries[pair_key(a, b)]
    except KeyError:
        raise DataError(f"no distance for pair {a}/{b}") from None


def great_circle_km(capitals: CapitalTable, a: str, b: str) -> float:
    """Haversine distance between two capitals on a 6371 km sphere."""
    if a == b:
        raise DataError(f"distance requested between {a} and itself")
    try:
        p, q = capitals.coords[a], capitals.coords[b]
    except KeyError as exc:
        raise DataError(f"no capital coordinates for {exc.args[0]}") from None
    lat1, lat2 = math.radians(p.lat), math.radians(q.lat)
    dlat = lat2 - lat1
    dlon = math.radians(q.lon - p.lon)
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    # atan2 keeps precision near antipodes, where asin(sqrt(h)) does not
    return 2 * EARTH_RADIUS_KM * math.atan2(math.sqrt(h), math.sqrt(max(0.0, 1.0 - h)))


def resolve_distance(
    table: DistanceTable | None, capitals: CapitalTable | None, a: str, b: str
) -> float:
    """Stored distance if present, otherwise the great-circle fallback."""
    if table is not None and (a, b) in table:
        return distance(table, a, b)
    if capitals is None:
        raise DataError(f"no distance for pair {a}/{b}")
    km = great_circle_km(capitals, a, b)
    if km <= 0:
        raise DataError(f"capitals of {a} and {b} coincide; distance must be positive")
    return km


def distances_from_capitals(capitals: CapitalTable, codes: Iterable[str]) -> DistanceTable:
    codes = sorted(codes)
    return DistanceTable(
        {(a, b): great_circle_km(capitals, a, b) for i, a in enumerate(codes) for b in codes[i + 1:]}
    )
