import os

import pytest
from hypothesis import HealthCheck, settings

from chamber_atlas.arrangement import enumerate_chambers, resonance_arrangement, threshold_arrangement
from chamber_atlas.graph import build_compatibility_graph, classify_cliques, enumerate_maximal_cliques

settings.register_profile(
    "atlas", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "atlas"))

ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:2d}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


class Timed:
    """Result of a computation together with its wall time in seconds."""

    def __init__(self, value, seconds):
        self.value = value
        self.seconds = seconds


def _timed(fn, *args, **kwargs):
    import time

    start = time.perf_counter()
    value = fn(*args, **kwargs)
    return Timed(value, time.perf_counter() - start)


@pytest.fixture(scope="session")
def resonance_chambers():
    """Timed chamber lists of the resonance arrangements, computed once per session."""
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = _timed(enumerate_chambers, resonance_arrangement(n))
        return cache[n]

    return get


@pytest.fixture(scope="session")
def threshold_chambers():
    """Keyed by arrangement dimension."""
    cache = {}

    def get(dim):
        if dim not in cache:
            cache[dim] = _timed(enumerate_chambers, threshold_arrangement(dim))
        return cache[dim]

    return get


@pytest.fixture(scope="session")
def clique_data():
    cache = {}

    def get(n, positive=False):
        key = (n, positive)
        if key not in cache:
            def run():
                G = build_compatibility_graph(n, positive)
                cliques = enumerate_maximal_cliques(G)
                return G, classify_cliques(G, cliques)

            cache[key] = _timed(run)
        return cache[key]

    return get
