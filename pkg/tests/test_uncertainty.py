import math

import numpy as np
import pytest

from conftest import random_decomposition, random_instance
from mcu.costs import build_instance, instance_from_costs
from mcu.exceptions import InputError, MoveError, UnsupportedPriorError
from mcu.graph import LiftedGraph, Partition, energy
from mcu.solvers import solve_klj
from mcu.uncertainty import (
    calibrated_probability,
    compute_report,
    gamma_move,
    legal_targets,
    likelihood_confidence,
    log_move_ratio,
    node_uncertainty,
    select_hard_examples,
)


def path_example():
    g = LiftedGraph(3, [(0, 1), (1, 2)])
    return g, instance_from_costs(g, [-2.0, 3.0]), Partition([0, 1, 1])


class TestGamma:
    def test_path(self):
        g, c, p = path_example()
        assert gamma_move(g, c, p, 1, 0) == pytest.approx(5.0)
        r = node_uncertainty(g, c, p, 1)
        assert r.gamma == pytest.approx(5.0) and r.best_target_cluster == 0
        assert r.confidence == pytest.approx(0.993307, abs=1e-6)
        assert r.uncertainty == pytest.approx(1 - 0.993307, abs=1e-6)

    def test_triangle(self):
        g = LiftedGraph(3, [(0, 1), (0, 2), (1, 2)])
        c = instance_from_costs(g, [1.0, -1.0, -1.0])
        p = Partition([0, 0, 1])
        assert gamma_move(g, c, p, 0, 1) == pytest.approx(2.0)

    def test_lone_node_gamma_is_minus_edge_cost(self):
        g = LiftedGraph(2, [(0, 1)])
        c = instance_from_costs(g, [-4.0])
        assert node_uncertainty(g, c, Partition([0, 1]), 0).gamma == pytest.approx(4.0)

    def test_interior_node_is_certain(self):
        g = LiftedGraph(3, [(0, 1), (1, 2)])
        c = instance_from_costs(g, [1.0, 1.0])
        r = node_uncertainty(g, c, Partition([0, 0, 0]), 1)
        assert r == type(r)(1, math.inf, 1.0, 0.0, None)

    def test_illegal_targets(self):
        g = LiftedGraph(3, [(0, 1)], [(0, 2)])
        c = instance_from_costs(g, [1.0, 1.0])
        p = Partition([0, 1, 2])
        assert legal_targets(g, p, 0) == [1]
        with pytest.raises(MoveError):
            gamma_move(g, c, p, 0, 0)
        with pytest.raises(MoveError):
            gamma_move(g, c, p, 0, 2)  # only lifted edge into cluster 2

    def test_tie_goes_to_smaller_cluster(self):
        g = LiftedGraph(3, [(0, 1), (0, 2)])
        c = instance_from_costs(g, [-1.0, -1.0])
        assert node_uncertainty(g, c, Partition([0, 1, 2]), 0).best_target_cluster == 1

    def test_equals_energy_difference(self, rng):
        checked = 0
        for _ in range(200):
            g, c = random_instance(rng, int(rng.integers(2, 20)), edge_p=0.3, lifted_p=0.4)
            p = random_decomposition(rng, g)
            for v in range(g.n_nodes):
                for b in legal_targets(g, p, v):
                    moved = p.relabel(v, b)
                    diff = energy(g, c, moved) - energy(g, c, p)
                    assert gamma_move(g, c, p, v, b) == pytest.approx(diff, abs=1e-9)
                    checked += 1
        assert checked > 100


class TestProbabilityForm:
    def test_example(self):
        g = LiftedGraph(3, [(0, 1), (1, 2)])
        c = build_instance(g, [0.9, 0.2])
        p = Partition([0, 1, 1])
        # keep: 0.8 * 0.9; move: 0.1 * 0.2
        assert calibrated_probability(g, c, p, 1, 0) == pytest.approx(0.72 / 0.74, abs=1e-12)

    def test_matches_logistic(self, rng):
        for _ in range(100):
            g, c = random_instance(rng, int(rng.integers(2, 15)), edge_p=0.4)
            p = random_decomposition(rng, g)
            for v in range(g.n_nodes):
                for b in legal_targets(g, p, v):
                    gam = gamma_move(g, c, p, v, b)
                    assert calibrated_probability(g, c, p, v, b) == pytest.approx(1 / (1 + math.exp(-gam)), abs=1e-9)
                    assert log_move_ratio(g, c, p, v, b) == pytest.approx(-gam, abs=1e-9)

    def test_requires_unbiased_prior(self):
        g = LiftedGraph(2, [(0, 1)])
        c = build_instance(g, [0.3], beta=0.3)
        with pytest.raises(UnsupportedPriorError):
            calibrated_probability(g, c, Partition([0, 1]), 0, 1)

    def test_log_ratio_ordering_reverses_gamma(self, rng):
        for _ in range(50):
            g, c = random_instance(rng, 12, edge_p=0.4)
            p = random_decomposition(rng, g)
            for v in range(g.n_nodes):
                ts = legal_targets(g, p, v)
                if len(ts) < 2:
                    continue
                gam = [gamma_move(g, c, p, v, b) for b in ts]
                lr = [log_move_ratio(g, c, p, v, b) for b in ts]
                assert ts[int(np.argmin(gam))] == ts[int(np.argmax(lr))]


def test_local_optimum_has_non_negative_gamma(rng):
    for _ in range(30):
        g, c = random_instance(rng, int(rng.integers(3, 20)), edge_p=0.3, lifted_p=0.0)
        p = solve_klj(g, c).partition
        rep = compute_report(g, c, p)
        assert np.all(rep.gamma >= -1e-9)
        assert np.all(rep.confidence >= 0.5 - 1e-12)


class TestLikelihood:
    def test_examples(self):
        g = LiftedGraph(11, [(0, i) for i in range(1, 11)])
        c = build_instance(g, np.full(10, 0.4))
        assert likelihood_confidence(g, c, Partition.one_cluster(11), 0) == pytest.approx(0.6**10, rel=1e-9)
        assert 0.6**10 == pytest.approx(0.006047, abs=1e-6)
        g2 = LiftedGraph(3, [(0, 1), (0, 2)])
        c2 = build_instance(g2, [0.2, 0.7])
        assert likelihood_confidence(g2, c2, Partition([0, 0, 1]), 0) == pytest.approx(0.56)

    def test_degree_penalty(self):
        # same agreement per edge, more edges: lower confidence
        g = LiftedGraph(11, [(0, i) for i in range(1, 11)])
        c = build_instance(g, np.full(10, 0.1))
        rep = compute_report(g, c, Partition.one_cluster(11), "likelihood")
        assert rep.confidence[0] < rep.confidence[1]
        assert np.isnan(rep.gamma).all()


class TestReport:
    def test_matches_per_node(self, rng):
        for _ in range(40):
            g, c = random_instance(rng, int(rng.integers(1, 25)), edge_p=0.3, lifted_p=0.3)
            p = random_decomposition(rng, g)
            rep = compute_report(g, c, p)
            for v in range(g.n_nodes):
                ref = node_uncertainty(g, c, p, v)
                got = rep[v]
                assert got.best_target_cluster == ref.best_target_cluster
                assert got.gamma == pytest.approx(ref.gamma, abs=1e-9)
                assert got.confidence == pytest.approx(ref.confidence, abs=1e-12)
            lik = compute_report(g, c, p, "likelihood")
            for v in range(g.n_nodes):
                assert lik.confidence[v] == pytest.approx(likelihood_confidence(g, c, p, v), rel=1e-9)

    def test_ranges(self, rng):
        g, c = random_instance(rng, 30, edge_p=0.2)
        p = random_decomposition(rng, g)
        for m in ("calibrated", "likelihood"):
            rep = compute_report(g, c, p, m)
            assert np.all((rep.confidence >= 0) & (rep.confidence <= 1))
            assert np.allclose(rep.confidence + rep.uncertainty, 1.0)

    def test_unknown_method(self):
        g, c, p = path_example()
        with pytest.raises(InputError):
            compute_report(g, c, p, "entropy")


class TestHardExamples:
    def test_selection(self):
        p = Partition([0, 0, 0, 1, 1])

        class R:
            uncertainty = np.array([0.1, 0.2, 0.6, 0.05, 0.05])

        assert select_hard_examples(p, R, 0.25).tolist() == [2]
        assert select_hard_examples(p, R, 0.4).tolist() == []

    def test_uniform_cluster_selects_nothing(self):
        class R:
            uncertainty = np.full(4, 0.3)

        assert select_hard_examples(Partition([0, 0, 0, 0]), R, 0.0).tolist() == []

    def test_relabel_invariance(self, rng):
        g, c = random_instance(rng, 30, edge_p=0.2)
        p = random_decomposition(rng, g)
        rep = compute_report(g, c, p)
        perm = rng.permutation(p.n_clusters) + 7
        shuffled = perm[p.labels]
        assert select_hard_examples(shuffled, rep, 0.01).tolist() == select_hard_examples(p, rep, 0.01).tolist()
