from contextlib import contextmanager

import pytest

from bfsdg.instances import gen_ci, gen_tensor
from bfsdg.pipeline import prepare, run_bfs

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_RESULTS, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line for an acceptance criterion."""

    @contextmanager
    def run(number, title):
        info = {"detail": ""}
        ok = False
        try:
            yield info
            ok = True
        finally:
            tail = f" ({info['detail']})" if info["detail"] else ""
            line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}{tail}"
            print(line)
            request.config.stash[_RESULTS].append(line)

    return run


@pytest.fixture(scope="session")
def ci_spec():
    return gen_ci()


@pytest.fixture(scope="session")
def ci_stages(ci_spec):
    return prepare(ci_spec)


@pytest.fixture(scope="session")
def ci_run(ci_spec):
    return run_bfs(ci_spec)


@pytest.fixture(scope="session")
def tensor_spec():
    return gen_tensor()


@pytest.fixture(scope="session")
def tensor_stages(tensor_spec):
    return prepare(tensor_spec)


@pytest.fixture(scope="session")
def tensor_run(tensor_spec):
    return run_bfs(tensor_spec)
