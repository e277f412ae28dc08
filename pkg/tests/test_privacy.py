import math

import numpy as np
import pytest

from dypp.game_model import ActionGrids, DOProfile
from dypp.privacy import NO_PRIVACY, privacy_report, query_sensitivity, zcdp_budget


@pytest.mark.parametrize("L, X, expected", [(1.0, 64, 0.03125), (1.0, 2, 1.0), (0.5, 1, 1.0)])
def test_sensitivity(L, X, expected):
    assert query_sensitivity(DOProfile(c_n=1, beta_n=1, X_n=X, L_lip=L)) == expected


def test_budget_values():
    prof = DOProfile(c_n=1, beta_n=1, X_n=64, L_lip=1.0)
    assert zcdp_budget(0.6, prof) == pytest.approx(0.0013563368055555555, rel=1e-14)
    assert zcdp_budget(0.0, prof) == NO_PRIVACY == math.inf
    assert zcdp_budget(1.2, prof) == pytest.approx(zcdp_budget(0.6, prof) / 4, rel=1e-14)
    with pytest.raises(ValueError):
        zcdp_budget(-0.1, prof)


def test_budget_matches_gaussian_mechanism_form():
    prof = DOProfile(c_n=1, beta_n=1, X_n=32, L_lip=0.7)
    d = query_sensitivity(prof)
    for sigma in (0.05, 0.3, 0.6):
        assert zcdp_budget(sigma, prof) == pytest.approx(d ** 2 / (2 * sigma ** 2), rel=1e-14)


def test_report():
    g = ActionGrids()
    prof = DOProfile(c_n=1, beta_n=1, X_n=64, L_lip=1.0)
    full = privacy_report(12, prof, g)
    assert full.sigma == 0.0 and full.alpha == math.inf
    none = privacy_report(0, prof, g)
    assert none.sigma == 0.6
    mid = privacy_report(6, prof, g)
    assert mid.sigma == pytest.approx(0.3, abs=1e-15)
    assert mid.alpha == pytest.approx(0.005425347222222222, rel=1e-12)
    alphas = [privacy_report(j, prof, g).alpha for j in range(13)]
    assert none.alpha == min(alphas)
    assert np.all(np.diff(alphas) > 0)
    assert mid.sensitivity == 0.03125
