"""Mapping between local cut probabilities and multicut edge costs.

Costs are the log-odds of joining versus cutting plus a global prior term::

    c_e = log((1 - p_e) / p_e) + log((1 - beta) / beta)

where ``p_e`` is the cut probability of edge ``e`` and ``beta`` the prior
probability of a cut. Positive costs favour joining.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import InputError

EPS_P = 1e-6

__all__ = [
    "EPS_P",
    "InstanceCosts",
    "clamp_probability",
    "cost_from_probability",
    "probability_from_cost",
    "build_instance",
    "instance_from_costs",
    "prior_term",
]


def clamp_probability(p):
    return np.clip(p, EPS_P, 1.0 - EPS_P)


def _check_beta(beta):
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise InputError(f"beta must lie in (0, 1), got {beta}")
    return beta


def prior_term(beta):
    return float(np.log((1.0 - beta) / beta))


def cost_from_probability(p_cut, beta=0.5):
    """Edge cost for cut probability ``p_cut`` under cut prior ``beta``.

    Works elementwise on arrays. Inputs are clamped to
    ``[EPS_P, 1 - EPS_P]`` so the result is always finite.

    >>> float(cost_from_probability(0.5, 0.5))
    0.0
    """
    p = np.asarray(p_cut, dtype=float)
    if np.isnan(p).any() or np.isnan(beta):
        raise InputError("NaN probability")
    beta = _check_beta(beta)
    p = clamp_probability(p)
    out = np.log1p(-p) - np.log(p) + prior_term(beta)
    return out if out.ndim else float(out)


def probability_from_cost(c, beta=0.5):
    """Inverse of :func:`cost_from_probability` (without clamping)."""
    c = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise InputError("cost must be finite")
    beta = _check_beta(beta)
    out = expit(-(c - prior_term(beta)))
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class InstanceCosts:
    """Cut probabilities, prior and derived costs over ``E u F``.

    Both arrays are kept: solvers consume ``cost`` while the probability
    based uncertainty routines read ``cut_prob``.
    """

    cut_prob: np.ndarray
    beta: float
    cost: np.ndarray

    def __len__(self):
        return len(self.cost)

    @property
    def join_prob(self):
        return 1.0 - self.cut_prob

    def __eq__(self, other):
        if not isinstance(other, InstanceCosts):
            return NotImplemented
        return (self.beta == other.beta and np.array_equal(self.cut_prob, other.cut_prob)
                and np.array_equal(self.cost, other.cost))


def build_instance(g, cut_probs, beta=0.5):
    """Clamp ``cut_probs`` and derive costs for every edge of ``g``."""
    p = np.array(cut_probs, dtype=float).reshape(-1)
    if len(p) != g.n_total:
        raise InputError(f"got {len(p)} probabilities for {g.n_total} edges")
    if np.isnan(p).any() or (p < 0).any() or (p > 1).any():
        raise InputError("probabilities must lie in [0, 1]")
    beta = _check_beta(beta)
    p = clamp_probability(p)
    cost = np.atleast_1d(cost_from_probability(p, beta)).astype(float)
    p.setflags(write=False)
    cost.setflags(write=False)
    return InstanceCosts(cut_prob=p, beta=beta, cost=cost)


def instance_from_costs(g, cost, beta=0.5):
    """InstanceCosts whose probabilities reproduce the given cost vector.

    Convenient for hand-built examples specified directly in costs. The
    cost array is kept verbatim.
    """
    cost = np.array(cost, dtype=float).reshape(-1)
    if len(cost) != g.n_total:
        raise InputError(f"got {len(cost)} costs for {g.n_total} edges")
    p = np.atleast_1d(probability_from_cost(cost, beta)).astype(float)
    p.setflags(write=False)
    cost.setflags(write=False)
    return InstanceCosts(cut_prob=p, beta=_check_beta(beta), cost=cost)
