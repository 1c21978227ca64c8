import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

_criteria: dict[int, dict] = {}


@pytest.fixture(scope="session")
def golden_examples():
    with open(DATA / "golden_examples.jsonl", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    n, title = marker.args
    entry = _criteria.setdefault(n, {"title": title, "passed": True, "tests": 0})
    entry["tests"] += rep.when == "call"
    entry["passed"] &= rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        e = _criteria[n]
        status = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {n}: {e['title']} ({e['tests']} checks)")
