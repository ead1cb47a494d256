"""Acceptance bookkeeping: tests tagged ``@pytest.mark.criterion(k, title)`` roll up
into one PASS/FAIL line per criterion at the end of the session."""

from __future__ import annotations

from collections import OrderedDict

import pytest

_RESULTS: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is None:
            continue
        num, title = mark.args
        entry = _RESULTS.setdefault(num, {"title": title, "failed": [], "passed": 0, "skipped": 0})
        entry.setdefault("pending", set()).add(item.nodeid)


def pytest_runtest_logreport(report):
    for entry in _RESULTS.values():
        if report.nodeid not in entry.get("pending", ()):
            continue
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            entry["pending"].discard(report.nodeid)
            name = report.nodeid.split("::")[-1]
            if report.failed:
                entry["failed"].append(name)
            elif report.skipped:
                entry["skipped"] += 1
            else:
                entry["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    ran = [(k, e) for k, e in sorted(_RESULTS.items()) if e["passed"] or e["failed"] or e["skipped"]]
    if not ran:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num, entry in ran:
        if entry["failed"]:
            status = "FAIL"
            detail = "failed: " + ", ".join(entry["failed"])
        elif entry["pending"] or entry["skipped"]:
            status = "INCOMPLETE"
            detail = f"{entry['passed']} passed, {entry['skipped']} skipped"
        else:
            status = "PASS"
            detail = f"{entry['passed']} checks"
        tr.write_line(f"AC{num:<2} {status:<10} {entry['title']} ({detail})")
