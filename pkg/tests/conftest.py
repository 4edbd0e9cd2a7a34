import random

import pytest

from treecast import _backend, _fallback
from treecast.matrix import ReachMatrix

KERNELS = [pytest.param(_fallback, id="python")]
if _backend.compiled_available():
    from treecast import _kernels

    KERNELS.append(pytest.param(_kernels, id="compiled"))


@pytest.fixture(params=KERNELS)
def kern(request):
    return request.param


def random_reflexive(n: int, rng: random.Random, density: float = 0.3) -> ReachMatrix:
    rows = []
    for x in range(n):
        r = 1 << x
        for y in range(n):
            if rng.random() < density:
                r |= 1 << y
        rows.append(r)
    return ReachMatrix(n, tuple(rows))


_CRITERIA: list[tuple[tuple, bool]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _CRITERIA.append((m.args, report.passed))


def pytest_terminal_summary(terminalreporter, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, text), passed in sorted(_CRITERIA, key=lambda r: r[0][0]):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if passed else 'FAIL'}  {text}")
