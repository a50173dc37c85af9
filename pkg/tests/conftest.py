import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def unit_vectors():
    """Hypothesis strategy for points on the 2-sphere."""
    coord = st.floats(-1.0, 1.0, allow_nan=False)
    return (
        st.tuples(coord, coord, coord)
        .filter(lambda v: 0.1 < np.linalg.norm(v))
        .map(lambda v: np.asarray(v) / np.linalg.norm(v))
    )


def angles():
    return st.floats(0.0, 2 * np.pi, allow_nan=False, exclude_max=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Times a criterion body and records one PASS/FAIL line for the summary."""
    start = time.perf_counter()
    holder = {"detail": ""}
    yield holder
    elapsed = time.perf_counter() - start
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"{'PASS' if ok else 'FAIL'} {request.node.name} ({elapsed:.2f}s) {holder['detail']}".rstrip()
    ACCEPTANCE_LINES.append(line)


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
