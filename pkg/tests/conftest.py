import pytest

from trapdoorfc import kernels


@pytest.fixture(params=sorted(kernels.available()))
def backend(request):
    """Run a test once per available kernel backend."""
    old = kernels.use(request.param)
    yield request.param
    kernels.use(old.NAME)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def record_criterion():
    """Store one PASS/FAIL line per acceptance criterion for the run summary."""
    def record(number: int, ok: bool, detail: str) -> None:
        _CRITERIA[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
