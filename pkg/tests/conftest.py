_results = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    n = int(name.split("_")[2])
    if report.when == "call" or report.failed:
        prev = _results.get(n, ("PASS", 0.0))
        status = "FAIL" if report.failed or prev[0] == "FAIL" else "PASS"
        _results[n] = (status, prev[1] + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, seconds = _results[n]
        terminalreporter.write_line(f"CRITERION {n}: {status} ({seconds:.2f} s)")
