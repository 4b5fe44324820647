import itertools

import numpy as np
import pytest

from sposs.matroids import Matroid


def powerset(items):
    items = sorted(items)
    for k in range(len(items) + 1):
        yield from (frozenset(c) for c in itertools.combinations(items, k))


def brute_force_rank(matroid, s):
    return max(len(t) for t in powerset(s) if matroid.is_independent(t))


def brute_force_max_weight(matroid, w):
    best, best_val = frozenset(), -1.0
    for t in powerset(matroid.ground):
        if matroid.is_independent(t):
            val = sum(w[e] for e in t)
            if val > best_val + 1e-12:
                best, best_val = t, val
    return best, best_val


def random_partition_matroid(rng, n):
    n_blocks = int(rng.integers(2, max(3, n // 2 + 1)))
    assignment = rng.integers(0, n_blocks, size=n)
    blocks = [list(np.flatnonzero(assignment == b)) for b in range(n_blocks)]
    blocks = [b for b in blocks if b]
    caps = [int(rng.integers(1, 3)) for _ in blocks]
    return Matroid.partition(blocks, caps)


def random_graphic_matroid(rng, n_edges):
    nv = int(rng.integers(3, 7))
    edges = [
        (int(rng.integers(0, nv)), int(rng.integers(0, nv)))
        for _ in range(n_edges)
    ]
    return Matroid.graphic(nv, edges)


def explicit_from(matroid):
    """Materialize any small matroid as an Explicit family (oracle for tests)."""
    sets = [sorted(t) for t in powerset(matroid.ground)
            if matroid.is_independent(t)]
    return Matroid.explicit(matroid.ground, sets)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


# One line per acceptance criterion, filled in by tests/test_acceptance.py
# and echoed after the run (bypasses pytest's output capture).
acceptance_lines: list = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
