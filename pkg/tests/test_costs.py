import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_instance
from mcu.costs import EPS_P, build_instance, cost_from_probability, probability_from_cost
from mcu.exceptions import InputError
from mcu.graph import LiftedGraph, Partition, energy, is_decomposition
from mcu.solvers import restricted_growth_strings

probs = st.floats(1e-5, 1 - 1e-5)


@pytest.mark.parametrize("p, beta, expected", [
    (0.5, 0.5, 0.0),
    (math.e / (1 + math.e), 0.5, -1.0),
    (0.1, 0.1, math.log(9) + math.log(9)),
    (0.9, 0.5, math.log(1 / 9)),
])
def test_cost_examples(p, beta, expected):
    assert cost_from_probability(p, beta) == pytest.approx(expected, abs=1e-12)


def test_log9_value():
    assert 2 * math.log(9) == pytest.approx(4.39445, abs=1e-5)


@pytest.mark.parametrize("c, beta, expected", [(0.0, 0.5, 0.5), (-1.0, 0.5, math.e / (1 + math.e))])
def test_probability_examples(c, beta, expected):
    assert probability_from_cost(c, beta) == pytest.approx(expected, abs=1e-12)


def test_round_trip_example():
    assert probability_from_cost(cost_from_probability(0.37, 0.5), 0.5) == pytest.approx(0.37, abs=1e-12)


def test_clamping_keeps_costs_finite():
    assert math.isfinite(cost_from_probability(0.0))
    assert cost_from_probability(0.0) == pytest.approx(math.log((1 - EPS_P) / EPS_P))
    assert cost_from_probability(1.0) == pytest.approx(-math.log((1 - EPS_P) / EPS_P))


def test_nan_rejected():
    with pytest.raises(InputError):
        cost_from_probability(float("nan"))


@given(probs)
def test_antisymmetry(p):
    assert cost_from_probability(p, 0.5) == pytest.approx(-cost_from_probability(1 - p, 0.5), abs=1e-9)


@given(probs, probs)
def test_strictly_decreasing(p, q):
    if abs(p - q) > 1e-9:
        lo, hi = min(p, q), max(p, q)
        assert cost_from_probability(lo, 0.3) > cost_from_probability(hi, 0.3)


class TestBuildInstance:
    def test_all_half(self):
        g = LiftedGraph(3, [(0, 1), (1, 2)], [(0, 2)])
        c = build_instance(g, [0.5, 0.5, 0.5], 0.5)
        assert c.cost.tolist() == [0.0, 0.0, 0.0]

    def test_examples(self):
        g = LiftedGraph(2, [(0, 1)])
        assert build_instance(g, [0.9]).cost[0] == pytest.approx(-2.19722, abs=1e-5)
        g2 = LiftedGraph(3, [(0, 1), (1, 2)])
        c = build_instance(g2, [0.2, 0.8])
        assert c.cost == pytest.approx([math.log(4), -math.log(4)], abs=1e-12)

    def test_invariants(self, rng):
        g, c = random_instance(rng, 8, beta=0.3, p_range=(0.0, 1.0))
        assert np.all(c.cut_prob >= EPS_P) and np.all(c.cut_prob <= 1 - EPS_P)
        expected = np.log((1 - c.cut_prob) / c.cut_prob) + np.log(0.7 / 0.3)
        assert np.max(np.abs(c.cost - expected)) < 1e-12

    @pytest.mark.parametrize("probs", [[0.5], [0.5, 0.5, 0.5], [0.5, 1.2], [0.5, -0.1], [0.5, float("nan")]])
    def test_errors(self, probs):
        g = LiftedGraph(3, [(0, 1), (1, 2)])
        with pytest.raises(InputError):
            build_instance(g, probs)


def test_map_consistency(rng):
    """Energy minimiser == maximiser of the posterior product over decompositions."""
    for _ in range(30):
        n = int(rng.integers(2, 7))
        beta = float(rng.uniform(0.2, 0.8))
        g, c = random_instance(rng, n, beta=beta)
        parts = [Partition(s) for s in restricted_growth_strings(n)]
        parts = [p for p in parts if is_decomposition(g, p)]
        energies = [energy(g, c, p) for p in parts]

        def log_posterior(p):
            cut = p.labels[g.edges[:, 0]] != p.labels[g.edges[:, 1]]
            pc = c.cut_prob
            like = np.where(cut, np.log(pc), np.log(1 - pc)).sum()
            prior = np.where(cut, math.log(beta), math.log(1 - beta)).sum()
            return like + prior

        post = [log_posterior(p) for p in parts]
        assert int(np.argmin(energies)) == int(np.argmax(post))
        # energy is the negative log posterior up to a constant
        diffs = np.array(energies) + np.array(post)
        assert np.ptp(diffs) < 1e-9

