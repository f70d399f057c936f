"""Shared pytest configuration.

Prints one PASS/FAIL line per acceptance criterion at the end of the run.
"""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    reports = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call":
                continue
            if "test_acceptance.py" in rep.nodeid:
                reports.append(rep)
    if not reports:
        return
    terminalreporter.section("acceptance criteria")
    for rep in sorted(reports, key=lambda r: r.nodeid):
        status = "PASS" if rep.passed else "FAIL"
        name = rep.nodeid.split("::")[-1]
        terminalreporter.write_line(f"{status}  {name}")
