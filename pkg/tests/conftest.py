from __future__ import annotations

import json
import socket
import time
from pathlib import Path

import pytest

from aac.model import parse_canvas

FIXTURES = Path(__file__).parent / "fixtures"
RUNTIME_BUDGET_S = 60.0

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
_session = {"start": time.perf_counter()}


class NetworkBlocked(RuntimeError):
    pass


def _refuse(*args, **kwargs):
    raise NetworkBlocked("network access is disabled during tests")


@pytest.fixture(autouse=True, scope="session")
def no_network():
    """Every socket connection attempt fails for the whole run."""
    saved = (socket.socket.connect, socket.socket.connect_ex, socket.create_connection,
             socket.getaddrinfo)
    socket.socket.connect = _refuse
    socket.socket.connect_ex = _refuse
    socket.create_connection = _refuse
    socket.getaddrinfo = _refuse
    yield
    (socket.socket.connect, socket.socket.connect_ex, socket.create_connection,
     socket.getaddrinfo) = saved


def pytest_sessionstart(session):
    _session["start"] = time.perf_counter()


def pytest_collection_modifyitems(config, items):
    # acceptance checks run last so the runtime criterion sees the whole suite
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.perf_counter() - _session["start"]
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
    if 9 in ACCEPTANCE:
        ok = elapsed < RUNTIME_BUDGET_S
        terminalreporter.write_line(
            f"criterion 9 (whole session): {'PASS' if ok else 'FAIL'} - {elapsed:.1f} s < {RUNTIME_BUDGET_S:.0f} s")


def pytest_sessionfinish(session, exitstatus):
    if ACCEPTANCE and time.perf_counter() - _session["start"] >= RUNTIME_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1


def elapsed_since_start() -> float:
    return time.perf_counter() - _session["start"]


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def fixture_doc(name: str):
    return json.loads(fixture_text(name))


def load_fixture(name: str, **kw):
    return parse_canvas(fixture_text(name), **kw)


@pytest.fixture
def opentargets():
    return load_fixture("opentargets.json")


@pytest.fixture
def minimal():
    return load_fixture("minimal.json")
