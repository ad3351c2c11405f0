def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        outcome = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\n[acceptance] {name}: {outcome}", flush=True)
