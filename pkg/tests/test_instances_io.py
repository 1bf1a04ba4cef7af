import itertools
import math

import numpy as np
import pytest

from conftest import random_decomposition, random_instance
from mcu.exceptions import InputError, ParseError
from mcu.graph import Partition
from mcu.instances import (
    GridConfig,
    PlantedConfig,
    analytic_lifted_count,
    bresenham,
    generate_planted,
    grid_from_edgemap,
    lifted_offsets,
)
from mcu.io import (
    read_ground_truth,
    read_instance,
    read_partition,
    read_pgm,
    read_report,
    write_ground_truth,
    write_instance,
    write_partition,
    write_pgm,
    write_report,
)
from mcu.costs import EPS_P
from mcu.solvers import solve_exact, solve_gaec
from mcu.uncertainty import compute_report


class TestPlanted:
    def test_noise_free_probabilities_and_recovery(self):
        for seed in range(10):
            cfg = PlantedConfig(n_nodes=int(4 + seed % 7), n_clusters=2 + seed % 3, edge_density=0.5, seed=seed)
            g, c, gt = generate_planted(cfg)
            inter = gt.gt_labels[g.edges[:, 0]] != gt.gt_labels[g.edges[:, 1]]
            assert np.allclose(c.cut_prob[inter], 0.9, atol=1e-15)
            assert np.allclose(c.cut_prob[~inter], 0.1, atol=1e-15)
            assert solve_exact(g, c).partition == Partition(gt.gt_labels)

    def test_seed_determinism(self, tmp_path):
        cfg = PlantedConfig(n_nodes=60, flip_noise=0.2, seed=3)
        write_instance(tmp_path / "a.txt", *generate_planted(cfg)[:2])
        write_instance(tmp_path / "b.txt", *generate_planted(cfg)[:2])
        assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()
        other = PlantedConfig(n_nodes=60, flip_noise=0.2, seed=4)
        write_instance(tmp_path / "c.txt", *generate_planted(other)[:2])
        assert (tmp_path / "a.txt").read_bytes() != (tmp_path / "c.txt").read_bytes()

    def test_single_cluster(self):
        g, c, gt = generate_planted(PlantedConfig(n_nodes=9, n_clusters=1, seed=1))
        assert np.all(c.cut_prob < 0.5)
        assert solve_exact(g, c).partition.n_clusters == 1

    def test_connected_and_clusters_valid(self):
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        g, c, gt = generate_planted(PlantedConfig(n_nodes=80, edge_density=0.01, seed=2))
        adj = coo_matrix((np.ones(g.n_edges), (g.edges_E[:, 0], g.edges_E[:, 1])), shape=(80, 80))
        assert connected_components(adj, directed=False)[0] == 1
        from mcu.graph import is_decomposition
        assert is_decomposition(g, Partition(gt.gt_labels))

    def test_noise_range(self):
        g, c, gt = generate_planted(PlantedConfig(flip_noise=0.3, seed=0))
        dist = np.abs(c.cut_prob - 0.5)
        assert np.all(dist <= 0.4 + 1e-12) and np.all(dist >= 0.1 - 1e-12)

    def test_partial_labels(self):
        _, _, gt = generate_planted(PlantedConfig(n_nodes=50, labeled_fraction=0.3, seed=0))
        assert len(gt.nodes) == 15 and np.all(np.diff(gt.nodes) > 0)

    @pytest.mark.parametrize("kw", [dict(n_clusters=0), dict(n_nodes=3, n_clusters=4),
                                    dict(edge_density=0.0), dict(flip_noise=0.5)])
    def test_invalid(self, kw):
        with pytest.raises(InputError):
            PlantedConfig(**kw)


class TestGrid:
    def test_offsets_and_count(self):
        offs = lifted_offsets(2.0)
        assert set(offs) == {(2, 0), (-1, 1), (1, 1), (0, 2)}
        for w, h, tau in ((5, 4, 2.0), (7, 3, 3.5), (6, 6, 20.0), (4, 4, 1.0)):
            brute = sum(1 for a, b in itertools.combinations(itertools.product(range(w), range(h)), 2)
                        if 1 < (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 <= tau * tau)
            g, _ = grid_from_edgemap(GridConfig(w, h, tau), np.zeros((h, w)))
            assert g.n_lifted == brute == analytic_lifted_count(w, h, tau)
            assert g.n_edges == (w - 1) * h + w * (h - 1)

    def test_bresenham(self):
        assert bresenham(3, 0) == ((0, 0), (1, 0), (2, 0), (3, 0))
        assert bresenham(2, 2) == ((0, 0), (1, 1), (2, 2))
        pts = bresenham(-3, 5)
        assert pts[0] == (0, 0) and pts[-1] == (-3, 5) and len(pts) == 6

    def test_uniform_maps(self):
        cfg = GridConfig(6, 5, 3.0)
        g, c = grid_from_edgemap(cfg, np.zeros((5, 6)))
        assert np.all(c.cut_prob == EPS_P)
        assert solve_gaec(g, c).partition.n_clusters == 1
        g, c = grid_from_edgemap(cfg, np.ones((5, 6)))
        assert np.all(c.cut_prob > 0.99)
        assert solve_gaec(g, c).partition.n_clusters == 30

    def test_lifted_probability_along_line(self):
        em = np.zeros((1, 4))
        em[0, 1], em[0, 2] = 0.5, 0.2
        g, c = grid_from_edgemap(GridConfig(4, 1, 3.0), em)
        e = g.edge_index(0, 3)
        assert e >= g.n_edges
        assert c.cut_prob[e] == pytest.approx(1 - 0.5 * 0.8)
        assert c.cut_prob[g.edge_index(1, 2)] == pytest.approx(0.5)

    def test_step_edge(self):
        h, w = 8, 9
        em = np.zeros((h, w))
        em[:, w // 2] = 1.0
        g, c = grid_from_edgemap(GridConfig(w, h, 3.0), em)
        lab = solve_gaec(g, c).partition.labels.reshape(h, w)
        left, right = lab[:, : w // 2], lab[:, w // 2 + 1:]
        assert len(np.unique(left)) == 1 and len(np.unique(right)) == 1
        assert left[0, 0] != right[0, 0]
        # the edge pixels themselves belong to neither side
        assert len(np.unique(lab[:, w // 2])) == h

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            grid_from_edgemap(GridConfig(4, 3), np.zeros((4, 3)))
        with pytest.raises(InputError):
            grid_from_edgemap(GridConfig(2, 1), np.array([[0.0, 1.5]]))


class TestFiles:
    def test_instance_round_trip(self, rng, tmp_path):
        for i in range(20):
            g, c = random_instance(rng, int(rng.integers(1, 20)), beta=float(rng.uniform(0.1, 0.9)))
            write_instance(tmp_path / "i.txt", g, c, comment="test")
            g2, c2 = read_instance(tmp_path / "i.txt")
            assert g2 == g and c2 == c

    def test_partition_and_gt_round_trip(self, rng, tmp_path):
        g, _ = random_instance(rng, 15)
        p = random_decomposition(rng, g)
        write_partition(tmp_path / "p.txt", p)
        assert read_partition(tmp_path / "p.txt", 15) == p
        gt = generate_planted(PlantedConfig(n_nodes=20, labeled_fraction=0.5))[2]
        write_ground_truth(tmp_path / "gt.txt", gt)
        assert read_ground_truth(tmp_path / "gt.txt") == gt

    def test_report_round_trip(self, rng, tmp_path):
        g, c = random_instance(rng, 12)
        p = random_decomposition(rng, g)
        for m in ("calibrated", "likelihood"):
            rep = compute_report(g, c, p, m)
            write_report(tmp_path / "r.txt", rep)
            assert read_report(tmp_path / "r.txt") == rep

    @pytest.mark.parametrize("body, line", [
        ("nodes 3\nedge 0 1 0.5\nlifted 0 1 0.2\n", None),
        ("edge 0 1 0.5\n", None),
        ("nodes 3\nedge 1 0 0.5\n", 2),
        ("nodes 3\nedge 0 1 abc\n", 2),
        ("nodes 3\nbeta 0.5\nvertex 0\n", 3),
        ("nodes 3\nedge 0 5 0.5\n", 2),
        ("nodes 3\nedge 0 1 1.5\n", 2),
    ])
    def test_malformed_instances(self, tmp_path, body, line):
        path = tmp_path / "bad.txt"
        path.write_text(body)
        with pytest.raises(InputError) as err:
            read_instance(path)
        if line is not None:
            assert isinstance(err.value, ParseError) and f"line {line}" in str(err.value)

    def test_missing_nodes_header_named(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("beta 0.5\nedge 0 1 0.5\n")
        with pytest.raises(InputError, match="nodes"):
            read_instance(path)

    def test_pgm_round_trip(self, rng, tmp_path):
        img = rng.integers(0, 256, (7, 11)) / 255.0
        write_pgm(tmp_path / "e.pgm", img)
        assert np.allclose(read_pgm(tmp_path / "e.pgm"), img, atol=1e-12)
        (tmp_path / "x.pgm").write_bytes(b"P2\n1 1\n255\n0")
        with pytest.raises(ParseError):
            read_pgm(tmp_path / "x.pgm")


def test_float_format_is_lossless(tmp_path, rng):
    from mcu.costs import build_instance
    from mcu.graph import LiftedGraph

    g = LiftedGraph(2, [(0, 1)])
    for p in rng.uniform(0, 1, 50).tolist() + [math.nextafter(0.5, 1.0)]:
        c = build_instance(g, [p])
        write_instance(tmp_path / "f.txt", g, c)
        assert read_instance(tmp_path / "f.txt")[1].cut_prob[0] == c.cut_prob[0]
