"""Minimum cost (lifted) multicuts with calibrated per-node uncertainty."""

__version__ = "0.1.0"

from .costs import InstanceCosts, build_instance, cost_from_probability, probability_from_cost
from .graph import (
    LiftedGraph,
    Partition,
    energy,
    is_feasible,
    labeling_from_partition,
    objective,
    partition_from_labeling,
)
from .instances import GridConfig, PlantedConfig, generate_planted, grid_from_edgemap
from .metrics import LabeledSubset, precision_recall_f, rand_index, variation_of_information
from .nbest import best_of_n_score, generate_nbest
from .solvers import SolverResult, solve_exact, solve_gaec, solve_klj
from .sparsification import compare_orderings, sparsify
from .uncertainty import (
    calibrated_probability,
    compute_report,
    gamma_move,
    likelihood_confidence,
    node_uncertainty,
    select_hard_examples,
)
