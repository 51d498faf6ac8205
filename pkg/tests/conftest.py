from __future__ import annotations

import pytest

CRITERIA = {
    1: "Stirling identity suite",
    2: "cumulant structure",
    3: "triple-representation and generator equivalence",
    4: "dynamics consistency (finite difference, group law)",
    5: "Duhamel identity",
    6: "duality, adjointness, number observable",
    7: "norm estimate",
    8: "degenerate cases",
    9: "harness determinism, exit codes, validation",
}

_outcomes: dict = {}
_notes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or report.failed:
        _outcomes.setdefault(crit, []).append(not failed)
    for key, value in report.user_properties:
        if key != "criterion" and report.when == "call":
            _notes.setdefault(crit, []).append(f"{key}={value}")


@pytest.fixture(autouse=True)
def _tag_criterion(request, record_property):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        record_property("criterion", marker.args[0])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for crit, name in CRITERIA.items():
        results = _outcomes.get(crit)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        line = f"criterion {crit}: {status}  {name}"
        if results:
            line += f"  ({sum(results)}/{len(results)} tests)"
        terminalreporter.write_line(line)
        for note in _notes.get(crit, []):
            terminalreporter.write_line(f"    {note}")
