"""Prints one pass/fail line per acceptance criterion at the end of the run.

Acceptance tests carry ``@pytest.mark.acceptance(number, title)`` and may
attach a short measurement with ``record_property("detail", text)``.
"""

_CRITERIA = {}  # nodeid -> (number, title)
_OUTCOMES = {}  # number -> list of (outcome, detail)


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            _CRITERIA[item.nodeid] = tuple(marker.args[:2])


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    number, _ = _CRITERIA[report.nodeid]
    details = [str(v) for k, v in report.user_properties if k == "detail"]
    if report.when == "call" or report.outcome != "passed":
        outcome = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        _OUTCOMES.setdefault(number, []).append((outcome, "; ".join(details)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    titles = {number: title for number, title in _CRITERIA.values()}
    terminalreporter.section("acceptance criteria")
    for number in sorted(titles):
        results = _OUTCOMES.get(number, [])
        outcomes = {o for o, _ in results}
        if not results:
            verdict = "NOT RUN"
        elif "FAIL" in outcomes:
            verdict = "FAIL"
        elif outcomes == {"SKIP"}:
            verdict = "SKIP"
        else:
            verdict = "PASS"
        detail = "; ".join(d for _, d in results if d)
        line = f"criterion {number}: {titles[number]}: {verdict}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
