import itertools

import numpy as np
import pytest

from qwsearch.graphs import from_edge_list


def clique_with_external(external, rng=None):
    """Marked k-clique on vertices 0..k-1; member p gets external[p] extra edges.

    All external edges go into one shared K_{max+1} hub so degrees are exact.
    """
    k = len(external)
    hub_size = max(3, max(external) + 1)
    hub = list(range(k, k + hub_size))
    edges = list(itertools.combinations(range(k), 2))
    edges += list(itertools.combinations(hub, 2))
    for p, e in enumerate(external):
        targets = hub if rng is None else list(rng.permutation(hub))
        edges += [(p, int(h)) for h in targets[:e]]
    return from_edge_list(edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20161116)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
