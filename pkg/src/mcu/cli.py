"""``mcu`` command line entry point.

Exit status: 0 on success, 1 on usage errors, 2 on data or validation
errors. Every written artifact gets a ``<file>.manifest.json`` next to it.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .costs import build_instance
from .exceptions import SizeError
from .graph import Partition
from .instances import GridConfig, PlantedConfig, generate_planted, grid_from_edgemap
from .io import (
    ensure_parent,
    read_ground_truth,
    read_instance,
    read_partition,
    read_pgm,
    write_ground_truth,
    write_instance,
    write_partition,
    write_pgm,
    write_report,
)
from .metrics import precision_recall_f, rand_index, variation_of_information
from .nbest import generate_nbest
from .solvers import solve_exact, solve_gaec, solve_klj
from .sparsification import ORDERINGS, sparsify, write_curves_csv
from .uncertainty import compute_report, select_hard_examples

log = logging.getLogger("mcu")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class _Run:
    """Collects what goes into the run manifests."""

    def __init__(self, argv):
        self.argv = list(argv)
        self.start = time.perf_counter()
        self.inputs = {}
        self.seeds = []

    def read(self, path):
        self.inputs[os.fspath(path)] = _sha256(path)
        return path

    def manifest(self, artifact):
        doc = {
            "command": ["mcu", *self.argv],
            "inputs": self.inputs,
            "seeds": self.seeds,
            "version": __version__,
            "duration_s": round(time.perf_counter() - self.start, 6),
        }
        with open(f"{artifact}.manifest.json", "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _env_seed(default=0):
    raw = os.environ.get("MCU_SEED")
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"MCU_SEED must be an integer, got {raw!r}") from None


def _seed_list(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _orderings(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in items if s not in ORDERINGS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"orderings must be drawn from {','.join(ORDERINGS)}")
    return items


def _edge_pattern(kind, width, height, rng):
    if kind == "step":
        em = np.zeros((height, width))
        em[:, width // 2] = 1.0
        return em
    if kind == "blobs":
        # piecewise constant regions with soft noise; boundaries become edges
        k = 4
        cx, cy = rng.uniform(0, width, k), rng.uniform(0, height, k)
        yy, xx = np.mgrid[0:height, 0:width]
        d = (xx[..., None] - cx) ** 2 + (yy[..., None] - cy) ** 2
        region = d.argmin(axis=2)
        em = np.zeros((height, width))
        em[:, 1:] = np.maximum(em[:, 1:], region[:, 1:] != region[:, :-1])
        em[1:, :] = np.maximum(em[1:, :], region[1:, :] != region[:-1, :])
        em = np.clip(0.85 * em + rng.uniform(0.0, 0.3, em.shape), 0.0, 1.0)
        return em
    raise UsageError(f"unknown pattern {kind!r}")


def cmd_gen(args, run):
    seed = args.seed if args.seed is not None else _env_seed()
    run.seeds.append(seed)
    if args.kind == "planted":
        cfg = PlantedConfig(args.n_nodes, args.n_clusters, args.edge_density, args.flip_noise,
                            seed, args.labeled_fraction)
        g, costs, gt = generate_planted(cfg)
        if args.beta != 0.5:
            costs = build_instance(g, costs.cut_prob, args.beta)
        ensure_parent(args.output)
        write_instance(args.output, g, costs, comment=f"planted {cfg}")
        run.manifest(args.output)
        if args.gt:
            ensure_parent(args.gt)
            write_ground_truth(args.gt, gt)
            run.manifest(args.gt)
    else:
        rng = np.random.default_rng(seed)
        em = _edge_pattern(args.pattern, args.width, args.height, rng)
        g, costs = grid_from_edgemap(GridConfig(args.width, args.height, args.tau), em, args.beta)
        ensure_parent(args.output)
        write_instance(args.output, g, costs, comment=f"grid {args.width}x{args.height} tau={args.tau}")
        run.manifest(args.output)
        if args.pgm:
            ensure_parent(args.pgm)
            write_pgm(args.pgm, em)
            run.manifest(args.pgm)
    return 0


def cmd_grid_from_pgm(args, run):
    em = read_pgm(run.read(args.input))
    h, w = em.shape
    g, costs = grid_from_edgemap(GridConfig(w, h, args.tau), em, args.beta)
    ensure_parent(args.output)
    write_instance(args.output, g, costs, comment=f"grid from {os.path.basename(args.input)} tau={args.tau}")
    run.manifest(args.output)
    return 0


def cmd_solve(args, run):
    g, costs = read_instance(run.read(args.input))
    if args.solver == "exact":
        res = solve_exact(g, costs)
    elif args.solver == "gaec":
        res = solve_gaec(g, costs)
    else:
        if args.init == "file":
            if not args.init_file:
                raise UsageError("--init file requires --init-file")
            init = read_partition(run.read(args.init_file), g.n_nodes)
        elif args.init == "singletons":
            init = Partition.singletons(g.n_nodes)
        else:
            init = solve_gaec(g, costs).partition
        res = solve_klj(g, costs, init)
    ensure_parent(args.output)
    write_partition(args.output, res.partition)
    run.manifest(args.output)
    print(f"{res.solver_name} energy {res.objective_value!r} clusters {res.partition.n_clusters}")
    return 0


def cmd_uncertainty(args, run):
    g, costs = read_instance(run.read(args.input))
    p = read_partition(run.read(args.partition), g.n_nodes)
    report = compute_report(g, costs, p, args.method)
    hard = select_hard_examples(p, report, args.phi) if args.hard_out else None
    ensure_parent(args.output)
    write_report(args.output, report)
    run.manifest(args.output)
    if hard is not None:
        ensure_parent(args.hard_out)
        with open(args.hard_out, "w", encoding="utf-8") as fh:
            fh.writelines(f"{v}\n" for v in hard.tolist())
        run.manifest(args.hard_out)
    return 0


def cmd_nbest(args, run):
    g, costs = read_instance(run.read(args.input))
    p = read_partition(run.read(args.partition), g.n_nodes)
    cands = generate_nbest(g, costs, p, args.n, args.epsilon)
    os.makedirs(args.output, exist_ok=True)
    index = os.path.join(args.output, "index.txt")
    with open(index, "w", encoding="utf-8") as fh:
        fh.write("# rank energy file\n")
        for rank, cand in enumerate(cands, 1):
            name = f"candidate_{rank:04d}.txt"
            write_partition(os.path.join(args.output, name), cand.partition)
            fh.write(f"{rank} {cand.energy!r} {name}\n")
    run.manifest(index)
    return 0


def cmd_sparsify(args, run):
    g, costs = read_instance(run.read(args.input))
    p = read_partition(run.read(args.partition), g.n_nodes)
    gt = read_ground_truth(run.read(args.gt), g.n_nodes)
    seeds = args.seeds if args.seeds is not None else [_env_seed(1)]
    run.seeds.extend(seeds)
    curves = []
    for method in args.orderings:
        if method == "random":
            curves.extend(sparsify(g, costs, p, gt, method, args.steps, args.min_density, s) for s in seeds)
        else:
            curves.append(sparsify(g, costs, p, gt, method, args.steps, args.min_density))
    if args.output == "-":
        write_curves_csv(sys.stdout, curves)
    else:
        ensure_parent(args.output)
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_curves_csv(fh, curves)
        run.manifest(args.output)
    return 0


def cmd_eval(args, run):
    p = read_partition(run.read(args.partition))
    gt = read_ground_truth(run.read(args.gt), len(p))
    if args.metric == "vi":
        print(repr(variation_of_information(p, gt)))
    elif args.metric == "ri":
        print(repr(rand_index(p, gt)))
    else:
        prec, rec, f = precision_recall_f(p, gt)
        print(f"precision {prec!r} recall {rec!r} f_measure {f!r}")
    return 0


def build_parser():
    parser = _Parser(prog="mcu", description="Minimum cost (lifted) multicut toolkit with node uncertainties.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--kind", choices=("planted", "grid"), required=True)
    p.add_argument("-o", "--output", required=True, help="instance file to write")
    p.add_argument("--seed", type=int, default=None, help="defaults to $MCU_SEED, then 0")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--n-nodes", type=int, default=200)
    p.add_argument("--n-clusters", type=int, default=5)
    p.add_argument("--edge-density", type=float, default=0.2)
    p.add_argument("--flip-noise", type=float, default=0.3)
    p.add_argument("--labeled-fraction", type=float, default=1.0)
    p.add_argument("--gt", help="write the planted ground truth here")
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--height", type=int, default=32)
    p.add_argument("--tau", type=float, default=20.0)
    p.add_argument("--pattern", choices=("step", "blobs"), default="blobs")
    p.add_argument("--pgm", help="also write the synthetic edge map")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("grid-from-pgm", help="lifted grid instance from a P5 edge map")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--tau", type=float, default=20.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.set_defaults(func=cmd_grid_from_pgm)

    p = sub.add_parser("solve", help="compute a decomposition")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--solver", choices=("gaec", "klj", "exact"), default="klj")
    p.add_argument("--init", choices=("singletons", "gaec", "file"), default="gaec")
    p.add_argument("--init-file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("uncertainty", help="per-node uncertainty report")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-p", "--partition", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--method", choices=("calibrated", "likelihood"), default="calibrated")
    p.add_argument("--hard-out", help="write hard-example node ids here")
    p.add_argument("--phi", type=float, default=0.1, help="segment threshold for hard examples")
    p.set_defaults(func=cmd_uncertainty)

    p = sub.add_parser("nbest", help="alternative likely decompositions")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-p", "--partition", required=True)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("-n", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.set_defaults(func=cmd_nbest)

    p = sub.add_parser("sparsify", help="sparsification curves as CSV")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-p", "--partition", required=True)
    p.add_argument("-g", "--gt", required=True)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--orderings", type=_orderings, default=list(ORDERINGS))
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--min-density", type=float, default=0.1)
    p.add_argument("--seeds", type=_seed_list, default=None, help="defaults to $MCU_SEED, then 1")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("eval", help="compare a partition with ground truth")
    p.add_argument("-p", "--partition", required=True)
    p.add_argument("-g", "--gt", required=True)
    p.add_argument("--metric", choices=("vi", "ri", "prf"), default="vi")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    run = _Run(argv)
    try:
        return args.func(args, run)
    except UsageError as exc:
        print(f"mcu: {exc}", file=sys.stderr)
        return 1
    except SizeError as exc:
        print(f"mcu: size guard: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"mcu: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
