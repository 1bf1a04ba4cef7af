import itertools

import numpy as np
import pytest

from mcu.costs import build_instance
from mcu.graph import LiftedGraph, partition_from_labeling


def random_instance(rng, n, edge_p=0.5, lifted_p=0.3, beta=0.5, p_range=(0.02, 0.98)):
    """Random graph with random lifted edges and uniform cut probabilities."""
    pairs = list(itertools.combinations(range(n), 2))
    draw = rng.random(len(pairs))
    E = [pr for pr, r in zip(pairs, draw) if r < edge_p]
    rest = [pr for pr, r in zip(pairs, draw) if r >= edge_p]
    F = [pr for pr in rest if rng.random() < lifted_p]
    g = LiftedGraph(n, E, F)
    probs = rng.uniform(*p_range, g.n_total)
    return g, build_instance(g, probs, beta)


def random_decomposition(rng, g, cut_p=None):
    """Decomposition from cutting a random subset of original edges."""
    cut_p = rng.uniform(0.1, 0.9) if cut_p is None else cut_p
    y = np.zeros(g.n_total, dtype=np.int8)
    y[: g.n_edges] = rng.random(g.n_edges) < cut_p
    return partition_from_labeling(g, y)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion in the terminal summary
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome
    elif report.when == "setup" and report.failed and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = "error"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
