import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qdm import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.backend_name()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


# ---- acceptance reporting ------------------------------------------------
# Acceptance tests attach ("criterion", "<id> <title>") and ("detail", text)
# to their user properties; one PASS/FAIL line per criterion is printed in
# the terminal summary.

_CRITERIA = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    props = dict(item.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _CRITERIA.append((props["criterion"], status, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in sorted(_CRITERIA, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"[{status}] criterion {name}" + (f" :: {detail}" if detail else ""))
