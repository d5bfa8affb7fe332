import os

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _clean_tol_env(monkeypatch):
    # the CLI writes HILBERT_GEOM_TOL; keep tests independent of each other
    monkeypatch.delenv("HILBERT_GEOM_TOL", raising=False)


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    """Collects one summary line per acceptance criterion."""

    def log(number, title, passed, seconds, limit, detail=""):
        line = (f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}  "
                f"[{seconds:.2f}s / {limit:g}s]  {detail}").rstrip()
        _ACCEPTANCE.append((number, line))
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
