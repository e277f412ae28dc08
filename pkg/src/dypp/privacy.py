"""zCDP accounting for the Gaussian mechanism applied to DO model updates."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .game_model import ActionGrids, DOProfile, noise_saving_of_index

#: budget reported when a DO saves all of its noise and so has no zCDP guarantee
NO_PRIVACY = math.inf


@dataclass(frozen=True)
class PrivacyReport:
    sensitivity: float
    sigma: float
    alpha: float


def query_sensitivity(profile: DOProfile) -> float:
    """L2 sensitivity ``2 L / X`` of one clipped mini-batch gradient step."""
    return 2.0 * profile.L_lip / profile.X_n


def zcdp_budget(sigma: float, profile: DOProfile) -> float:
    """Gaussian mechanism budget ``sensitivity**2 / (2 sigma**2)``."""
    if sigma < 0:
        raise ValueError(f"noise scale must be >= 0, got {sigma!r}")
    if sigma == 0:
        return NO_PRIVACY
    return 2.0 * profile.L_lip ** 2 / (profile.X_n ** 2 * sigma ** 2)


def privacy_report(delta_sigma_index: int, profile: DOProfile, grids: ActionGrids) -> PrivacyReport:
    sigma = grids.sigma_max - noise_saving_of_index(delta_sigma_index, grids)
    return PrivacyReport(query_sensitivity(profile), sigma, zcdp_budget(sigma, profile))
