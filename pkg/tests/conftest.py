import pytest

from hyperbm import _backend


@pytest.fixture(params=["python", "compiled"])
def backend(request):
    if request.param == "compiled" and not _backend.compiled_available():
        pytest.skip("compiled kernels not built")
    prev = _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(prev)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
