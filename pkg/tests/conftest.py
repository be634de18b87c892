import re

_results = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = re.search(r"test_acceptance\.py::(test_criterion_\d+[a-z]?_?\w*)", report.nodeid)
    if not m:
        return
    name = m.group(1)
    if hasattr(report, "wasxfail"):
        status = "FAIL (expected: documented upstream inconsistency, see notes)"
    elif report.passed:
        status = "PASS"
    else:
        status = "FAIL"
    _results.append((name, status, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status, dur in _results:
        terminalreporter.write_line(f"{name:<55s} {status}  [{dur:.1f}s]")
