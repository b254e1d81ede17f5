import os

import pytest

# acceptance outcomes, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def pure_backend(monkeypatch):
    """Force the numpy fallback for the duration of a test."""
    from caustica import _core
    from caustica._core import _fallback

    monkeypatch.setattr(_core, "rk4_linear", _fallback.rk4_linear)
    monkeypatch.setattr(_core, "cn_propagate", _fallback.cn_propagate)
    monkeypatch.setattr(_core, "BACKEND", "python")
    yield


@pytest.fixture(autouse=True)
def _no_thread_env(monkeypatch):
    monkeypatch.delenv("CAUSTICA_THREADS", raising=False)
