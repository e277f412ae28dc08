"""Exploitability of a strategy profile by exhaustive pure best responses.

Every payoff is bilinear in the two mixed strategies, so the best unilateral
deviation is always attained at a pure strategy and scanning the grid is exact.
The curator's payoff is a sum of independent per-DO terms, so its best
deviation is the sum of per-DO best deviations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .game_model import (ActionGrids, DOProfile, EconParams, LossModelParams, check_simplex,
                         curator_payoff_matrix, do_payoff_matrix)

GAIN_FLOOR = -1e-9


@dataclass
class ExploitabilityReport:
    do_gains: list[float]
    curator_gain: float
    curator_gains_per_do: list[float] = field(default_factory=list)

    @property
    def epsilon(self) -> float:
        return max([self.curator_gain, *self.do_gains])

    def is_epsilon_ne(self, eps: float = 0.05) -> bool:
        return self.epsilon <= eps

    def to_dict(self) -> dict:
        return {"do_gains": self.do_gains, "curator_gain": self.curator_gain,
                "curator_gains_per_do": self.curator_gains_per_do, "epsilon": self.epsilon}


def _gain(values: np.ndarray, probs: np.ndarray) -> float:
    """Best pure value minus the value of ``probs``, given per-action values."""
    current = math.fsum(values * probs)
    gain = float(values.max()) - current
    if gain < GAIN_FLOOR:
        raise ArithmeticError(f"negative best-response gain {gain!r}")
    return max(gain, 0.0)


def do_best_response_gain(x_n, y_n, profile: DOProfile, econ: EconParams, grids: ActionGrids) -> float:
    """How much DO ``n`` gains by switching from ``y_n`` to its best noise saving against ``x_n``."""
    x = check_simplex(x_n, grids.num_prices, "x_n")
    y = check_simplex(y_n, grids.num_savings, "y_n")
    # expected payoff of each pure saving against the pricing strategy x
    values = np.array([math.fsum(col) for col in (x[:, None] * do_payoff_matrix(profile, econ, grids)).T])
    return _gain(values, y)


def _curator_gain_n(x_n, y_n, profile, econ, loss_params, grids) -> float:
    x = check_simplex(x_n, grids.num_prices, "x_n")
    y = check_simplex(y_n, grids.num_savings, "y_n")
    matrix = curator_payoff_matrix(profile, econ, loss_params, grids)
    values = np.array([math.fsum(row) for row in matrix * y[None, :]])
    return _gain(values, x)


def curator_best_response_gains(x, y, profiles, econ: EconParams, loss_params: LossModelParams,
                                 grids: ActionGrids) -> list[float]:
    if not (len(x) == len(y) == len(profiles)):
        raise ValueError("need one strategy pair per DO profile")
    return [_curator_gain_n(x_n, y_n, p, econ, loss_params, grids) for x_n, y_n, p in zip(x, y, profiles)]


def curator_best_response_gain(x, y, profiles, econ: EconParams, loss_params: LossModelParams,
                               grids: ActionGrids) -> float:
    return math.fsum(curator_best_response_gains(x, y, profiles, econ, loss_params, grids))


def profile_exploitability(x, y, profiles, econ: EconParams, loss_params: LossModelParams,
                           grids: ActionGrids) -> ExploitabilityReport:
    """Exploitability of explicit pricing strategies ``x`` and saving strategies ``y``."""
    cur = curator_best_response_gains(x, y, profiles, econ, loss_params, grids)
    do = [do_best_response_gain(x_n, y_n, p, econ, grids) for x_n, y_n, p in zip(x, y, profiles)]
    return ExploitabilityReport(do_gains=do, curator_gain=math.fsum(cur), curator_gains_per_do=cur)


def most_visited_rows(policy: np.ndarray, visit_count: np.ndarray) -> np.ndarray:
    """Policy row at each agent's most-visited state (lowest state on ties)."""
    if np.any(visit_count.sum(axis=1) == 0):
        raise ValueError("an agent has no visited states")
    states = visit_count.argmax(axis=1)
    return policy[np.arange(policy.shape[0]), states]


def visit_weighted_rows(policy: np.ndarray, visit_count: np.ndarray) -> np.ndarray:
    if np.any(visit_count.sum(axis=1) == 0):
        raise ValueError("an agent has no visited states")
    w = visit_count / visit_count.sum(axis=1, keepdims=True)
    rows = np.einsum("ns,nsa->na", w, policy)
    return rows / rows.sum(axis=1, keepdims=True)


def exploitability(state, rows: str = "most-visited") -> ExploitabilityReport:
    """Exploitability of the learned policies of a finished :class:`~dypp.engine.EngineState`.

    ``rows`` picks which policy row stands for each learner's strategy:
    ``"most-visited"`` or ``"visit-weighted"``.
    """
    pick = {"most-visited": most_visited_rows, "visit-weighted": visit_weighted_rows}[rows]
    x = pick(state.curator.pi, state.curator.count)
    y = pick(state.do.pi, state.do.count)
    cfg = state.config
    return profile_exploitability(list(x), list(y), state.profiles, cfg.econ, cfg.loss_params, cfg.grids)
