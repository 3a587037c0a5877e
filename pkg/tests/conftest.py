import random

import pytest

from patchom.cayley import DegenerateHeights, Triangulation, parse_edges, regular_triangulation

EXAMPLE_H = [[0, 3, 2], [0, 0, 0], [1, 3, 0]]
EXAMPLE_A = [[-1, 1, -1], [1, 1, -1], [-1, -1, -1]]
STAIRCASE = Triangulation(2, 3, (parse_edges("11 12 13 23"), parse_edges("11 12 22 23"),
                                 parse_edges("11 21 22 23")))


def random_instance(d, n, seed, hi=10**6):
    """Seeded generic heights (redrawn on degeneracy) and a random sign matrix."""
    rng = random.Random(seed)
    while True:
        H = [[rng.randint(0, hi) for _ in range(n)] for _ in range(d)]
        try:
            T = regular_triangulation(H)
        except DegenerateHeights:
            continue
        A = [[rng.choice((-1, 1)) for _ in range(n)] for _ in range(d)]
        return H, T, A


@pytest.fixture(scope="session")
def example():
    T = regular_triangulation(EXAMPLE_H, maximize=True)
    return T, EXAMPLE_A


@pytest.fixture(scope="session")
def staircase():
    return STAIRCASE


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
