import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SLOW = os.environ.get("K3FANO_SLOW") == "1"
ACCEPTANCE = {}    # criterion test name -> report


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip = pytest.mark.skip(reason="long run; set K3FANO_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        ACCEPTANCE[name] = report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        rep = ACCEPTANCE[name]
        k = name.split("_")[2]
        label = " ".join(name.split("_")[3:])
        status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
        extra = ""
        if rep.skipped and isinstance(rep.longrepr, tuple):
            extra = f" ({rep.longrepr[2]})"
        terminalreporter.write_line(f"{status} criterion {k}: {label}{extra}")
