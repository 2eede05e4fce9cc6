import time

import numpy as np
import pytest

from edgewit import construct_edge_witness, optimize_witness, rho_b

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line[1])


@pytest.fixture
def acceptance_log(request):
    """Callable ``log(number, ok, text)`` collecting one summary line per criterion."""
    store = request.config.stash[_ACCEPTANCE_KEY]

    def log(number: int, ok: bool, text: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}"
        print(line)
        store.append((number, line))

    return log


@pytest.fixture(scope="session")
def rho_half():
    return rho_b(0.5)


@pytest.fixture(scope="session")
def w1(rho_half):
    """Initial witness for rho_b(0.5) together with its construction time."""
    t0 = time.perf_counter()
    wc = construct_edge_witness(rho_half, seed=0)
    return wc, time.perf_counter() - t0


@pytest.fixture(scope="session")
def optimized(w1, rho_half):
    """Full optimization run started from ``w1``; returns (report, seconds)."""
    wc, _ = w1
    t0 = time.perf_counter()
    report = optimize_witness(wc.W, seed=1, certificate_candidates=[rho_half])
    return report, time.perf_counter() - t0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_psd(rng, d, r=None):
    r = d if r is None else r
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    return g @ g.conj().T
