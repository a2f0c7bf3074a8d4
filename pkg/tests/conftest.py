import time

import pytest

from ncrand import _accel


@pytest.fixture(params=["numba", "numpy"])
def each_backend(request):
    if request.param == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    previous = _accel.backend()
    _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(previous)


TIMINGS: dict[str, float] = {}

# "criterion N: PASS/FAIL ..." lines, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


FREE_LADDER_N = (1, 2, 8, 64)
FREE_DIM, FREE_TRIALS, FREE_SEED = 512, 50, 2024


@pytest.fixture(scope="session")
def free_ladder():
    """The dim-512, 50-trial free ladder, shared by module and acceptance tests."""
    from ncrand.cltlab import SourceSpec, moment_ladder

    t0 = time.perf_counter()
    ladder = moment_ladder(SourceSpec("free_bernoulli_matrix", FREE_DIM), FREE_LADDER_N, FREE_TRIALS, FREE_SEED)
    TIMINGS["free_ladder"] = time.perf_counter() - t0
    return ladder


@pytest.fixture(scope="session")
def classical_1000():
    from ncrand.cltlab import classical_clt

    return classical_clt(1000, 100_000, seed=2024)
