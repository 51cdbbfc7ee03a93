from __future__ import annotations

import pytest

CRITERIA = {
    1: "published M_k rows reproduced exactly (and runtime budget)",
    2: "published S(n) reproduced at tolerance 1e-80",
    3: "topology invariants sum M_k = n, sum k*M_k = 6n",
    4: "area conservation |sum areas - 1| < 1e-80",
    5: "doubled precision leaves 80-digit areas, S and M unchanged",
    6: "central-pairing symmetry on 20 random (v, n)",
    7: "raster oracle within a-priori bound; 10x corruption detected",
    8: "three-gap theorem for 8 constants, n <= 10^4",
    9: "byte-identical JSON reports across thread counts",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(marker.args[0], []).append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number, text in CRITERIA.items():
        results = _outcomes.get(number)
        if not results:
            terminalreporter.write_line(f"criterion {number}: NOT RUN  {text}")
            continue
        failed = [name for name, out in results if out == "failed"]
        verdict = "FAIL" if failed else "PASS"
        detail = f"{len(results) - len(failed)}/{len(results)} checks passed"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(f"criterion {number}: {verdict}  {text} ({detail})")
