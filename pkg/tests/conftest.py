import pytest

from oddcolor import kernels
from oddcolor.cfls import build_cfls_coloring

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def cfls2():
    return build_cfls_coloring(2)


@pytest.fixture(scope="session")
def cfls3():
    return build_cfls_coloring(3)


@pytest.fixture(params=sorted(kernels.available()))
def backend(request):
    return request.param


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary."""

    def record(num, passed, detail=""):
        prev = ACCEPTANCE.get(num)
        ok = passed and (prev is None or prev[0])
        details = (prev[1] + "; " if prev and prev[1] else "") + detail
        ACCEPTANCE[num] = (ok, details)
        print(f"criterion {num}: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
