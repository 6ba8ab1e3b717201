from pathlib import Path

import pytest

from coulomb_trade.dataset import Dataset
from coulomb_trade.synth import SynthConfig, generate

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

_criteria: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    outcome = "PASS" if call.excinfo is None else (
        "SKIP" if call.excinfo.errisinstance(pytest.skip.Exception) else "FAIL"
    )
    _criteria.setdefault(number, (title, []))[1].append(outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    # parametrized criteria collapse to one line; any failure wins
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        outcome = next((o for o in ("FAIL", "PASS") if o in outcomes), "SKIP")
        terminalreporter.write_line(f"criterion {number}: {outcome}  {title}")


def synth_dataset(**kw) -> tuple[Dataset, dict]:
    flows, gdp, capitals, distances, info = generate(SynthConfig(**kw))
    return Dataset(flows, gdp, distances, capitals), info


@pytest.fixture
def fixtures_dir():
    return FIXTURES
