import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion.

    Usage: ``with criterion("AC1 ekert t0"): ...``; the line is PASS when the
    block finishes without an exception.
    """

    class _Recorder:
        def __call__(self, label):
            return _Entry(label)

    return _Recorder()


class _Entry:
    def __init__(self, label):
        self.label = label

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = "" if exc is None else f"  ({type(exc).__name__}: {str(exc).splitlines()[0][:120] if str(exc) else ''})"
        _ACCEPTANCE.append(f"[{status}] {self.label}{detail}")
        print(f"[{status}] {self.label}{detail}")
        return False


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
