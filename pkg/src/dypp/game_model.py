"""Economic model of the privacy pricing game.

The curator pays each data owner (DO) a quantized price ``p`` and the DO
answers with a quantized noise saving ``delta_sigma``; the DO then perturbs
its updates with Gaussian noise of scale ``sigma_max - delta_sigma``.
Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class ActionGrids:
    """Price grid with ``K + 1`` levels and noise-saving grid with ``J + 1`` levels."""

    K: int = 32
    J: int = 12
    p_max: float = 16.0
    sigma_max: float = 0.6

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")
        if int(self.J) != self.J or self.J < 1:
            raise ValueError(f"J must be a positive integer, got {self.J!r}")
        if not self.p_max > 0:
            raise ValueError(f"p_max must be > 0, got {self.p_max!r}")
        if not self.sigma_max > 0:
            raise ValueError(f"sigma_max must be > 0, got {self.sigma_max!r}")

    @property
    def num_prices(self) -> int:
        return self.K + 1

    @property
    def num_savings(self) -> int:
        return self.J + 1

    def prices(self) -> np.ndarray:
        return np.array([price_of_index(k, self) for k in range(self.K + 1)])

    def savings(self) -> np.ndarray:
        return np.array([noise_saving_of_index(j, self) for j in range(self.J + 1)])


@dataclass(frozen=True)
class DOProfile:
    """Private parameters of one data owner."""

    c_n: float
    beta_n: float
    X_n: int = 64
    L_lip: float = 1.0
    D_n: int = 600

    def __post_init__(self):
        if not self.c_n > 0:
            raise ValueError(f"c_n must be > 0, got {self.c_n!r}")
        if not self.beta_n > 0:
            raise ValueError(f"beta_n must be > 0, got {self.beta_n!r}")
        if int(self.X_n) != self.X_n or self.X_n < 1:
            raise ValueError(f"X_n must be a positive integer, got {self.X_n!r}")
        if not self.L_lip > 0:
            raise ValueError(f"L_lip must be > 0, got {self.L_lip!r}")
        if int(self.D_n) != self.D_n or self.D_n < 1:
            raise ValueError(f"D_n must be a positive integer, got {self.D_n!r}")


@dataclass(frozen=True)
class EconParams:
    lambda_r: float = 0.08
    nu: float = 2.5
    varpi: float = 0.6
    lambda_s: float = 0.2
    mu: float = 0.13
    zeta_1: float = 35.4278
    zeta_2: float = 102.2444

    def __post_init__(self):
        if not 0.0 <= self.varpi <= 1.0:
            raise ValueError(f"varpi must lie in [0, 1], got {self.varpi!r}")
        for name in ("lambda_r", "nu", "lambda_s", "mu", "zeta_1", "zeta_2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class LossModelParams:
    """Coefficients of the sigmoid loss surface over (noise saving, non-IID degree)."""

    gamma: tuple[float, float, float, float, float] = (0.013, 0.0044, 0.0057, 8.18, 0.14)
    sigma_max: float = 0.6

    def __post_init__(self):
        if len(self.gamma) != 5:
            raise ValueError(f"gamma needs 5 coefficients, got {len(self.gamma)}")
        if any(not g > 0 for g in self.gamma):
            raise ValueError(f"all gamma coefficients must be > 0, got {self.gamma!r}")
        if not self.sigma_max > 0:
            raise ValueError(f"sigma_max must be > 0, got {self.sigma_max!r}")


def check_simplex(probs, size: int | None = None, name: str = "strategy") -> np.ndarray:
    """Return ``probs`` as a float array after validating it is a distribution."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {p.shape}")
    if size is not None and p.shape[0] != size:
        raise ValueError(f"{name} must have {size} entries, got {p.shape[0]}")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError(f"{name} has entries outside [0, 1]")
    if abs(math.fsum(p) - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"{name} sums to {math.fsum(p)!r}, not 1")
    return p


def price_of_index(k: int, grids: ActionGrids) -> float:
    if not 0 <= k <= grids.K:
        raise IndexError(f"price index {k} outside [0, {grids.K}]")
    return k / grids.K * grids.p_max


def noise_saving_of_index(j: int, grids: ActionGrids) -> float:
    if not 0 <= j <= grids.J:
        raise IndexError(f"noise-saving index {j} outside [0, {grids.J}]")
    return j / grids.J * grids.sigma_max


def _on_grid(value: float, levels: np.ndarray, what: str) -> None:
    if not np.any(np.isclose(levels, value, rtol=0.0, atol=1e-12)):
        raise ValueError(f"{what} {value!r} is not a grid level")


def model_loss(delta_sigma: float, beta: float, params: LossModelParams) -> float:
    if not 0.0 <= delta_sigma <= params.sigma_max:
        raise ValueError(f"delta_sigma {delta_sigma!r} outside [0, {params.sigma_max}]")
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta!r}")
    g1, g2, g3, g4, g5 = params.gamma
    return g1 * math.exp(-g2 * beta) / (g3 + math.exp(-g4 * (params.sigma_max - delta_sigma))) + g5


def model_quality(delta_sigma: float, beta: float, econ: EconParams, params: LossModelParams) -> float:
    return -econ.zeta_1 * model_loss(delta_sigma, beta, params) + econ.zeta_2


def do_realized_payoff(p: float, delta_sigma: float, profile: DOProfile, econ: EconParams,
                       grids: ActionGrids) -> float:
    """Revenue minus privacy loss for one realized (price, saving) pair."""
    _on_grid(p, grids.prices(), "price")
    _on_grid(delta_sigma, grids.savings(), "noise saving")
    return _do_payoff(p, delta_sigma, profile, econ, grids.sigma_max)


def _do_payoff(p, delta_sigma, profile, econ, sigma_max):
    return econ.lambda_r * p - econ.nu * profile.c_n * (sigma_max - delta_sigma)


def curator_realized_payoff_per_do(p: float, delta_sigma: float, beta: float, econ: EconParams,
                                   loss_params: LossModelParams) -> float:
    quality = model_quality(delta_sigma, beta, econ, loss_params)
    return econ.varpi * econ.lambda_s * quality - (1.0 - econ.varpi) * econ.mu * p


def do_payoff_matrix(profile: DOProfile, econ: EconParams, grids: ActionGrids) -> np.ndarray:
    """Realized DO payoffs indexed ``[price_index, saving_index]``."""
    prices, savings = grids.prices(), grids.savings()
    return np.array([[_do_payoff(p, d, profile, econ, grids.sigma_max) for d in savings] for p in prices])


def curator_payoff_matrix(profile: DOProfile, econ: EconParams, loss_params: LossModelParams,
                          grids: ActionGrids) -> np.ndarray:
    """Realized per-DO curator payoffs indexed ``[price_index, saving_index]``."""
    prices, savings = grids.prices(), grids.savings()
    return np.array([
        [curator_realized_payoff_per_do(p, d, profile.beta_n, econ, loss_params) for d in savings]
        for p in prices
    ])


def _bilinear(x: np.ndarray, matrix: np.ndarray, y: np.ndarray) -> float:
    return math.fsum((np.outer(x, y) * matrix).ravel())


def do_expected_payoff(x_n, y_n, profile: DOProfile, econ: EconParams, grids: ActionGrids) -> float:
    """Expected DO payoff when the curator prices by ``x_n`` and the DO saves noise by ``y_n``."""
    x = check_simplex(x_n, grids.num_prices, "x_n")
    y = check_simplex(y_n, grids.num_savings, "y_n")
    return _bilinear(x, do_payoff_matrix(profile, econ, grids), y)


def curator_expected_payoff(x, y, profiles, econ: EconParams, loss_params: LossModelParams,
                            grids: ActionGrids) -> float:
    """Sum over DOs of the curator's per-DO expected payoff."""
    if not (len(x) == len(y) == len(profiles)):
        raise ValueError(
            f"need one strategy pair per DO: got {len(x)} pricing, {len(y)} saving, {len(profiles)} profiles")
    total = []
    for x_n, y_n, profile in zip(x, y, profiles):
        xs = check_simplex(x_n, grids.num_prices, "x_n")
        ys = check_simplex(y_n, grids.num_savings, "y_n")
        total.append(_bilinear(xs, curator_payoff_matrix(profile, econ, loss_params, grids), ys))
    return math.fsum(total)
