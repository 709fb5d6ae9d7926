import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wdsubgraph import _kernels  # noqa: E402

DATA = Path(__file__).parent / "data"

BACKENDS = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def write_dump(tmp_path):
    def _write(data: bytes, name: str = "dump.json") -> Path:
        path = tmp_path / name
        path.write_bytes(data)
        return path

    return _write


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    class Recorder:
        def __call__(self, name: str, passed: bool, detail: str = ""):
            _ACCEPTANCE.append((name, passed, detail))
            return passed

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
