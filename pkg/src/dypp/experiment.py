"""Scheme comparisons on a shared DO population."""
from __future__ import annotations

import dataclasses
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .engine import GameConfig, run_simulation, sample_profiles
from .learners import SCHEMES


def population_digest(config: GameConfig) -> str:
    blob = "|".join(f"{p.c_n!r},{p.beta_n!r},{p.X_n},{p.L_lip!r},{p.D_n}" for p in sample_profiles(config))
    return hashlib.sha256(blob.encode()).hexdigest()


def _check_schemes(schemes) -> list[str]:
    schemes = list(schemes)
    if not schemes:
        raise ValueError("no schemes given")
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; choose from {', '.join(SCHEMES)}")
    return schemes


def compare_schemes(config: GameConfig, schemes=SCHEMES, parallel: bool = False, backend=None) -> dict:
    """Run each scheme (on both sides) against the same seed and DO population.

    Returns ``{"population_digest": ..., "results": {scheme: SimulationResult}}``.
    """
    schemes = _check_schemes(schemes)
    configs = [dataclasses.replace(config, do_scheme=s, curator_scheme=s) for s in schemes]
    if parallel and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=len(configs)) as pool:
            results = list(pool.map(lambda c: run_simulation(c, backend), configs))
    else:
        results = [run_simulation(c, backend) for c in configs]
    return {"population_digest": population_digest(config), "results": dict(zip(schemes, results))}


def median_iterations(values) -> float:
    """Median of iterations-to-convergence where a run that never converged counts as infinite."""
    return float(np.median([math.inf if v is None else v for v in values]))


def compare_over_seeds(config: GameConfig, seeds, schemes=SCHEMES, backend=None) -> dict:
    """Per-scheme summaries over several master seeds plus the medians the comparison is judged on."""
    schemes = _check_schemes(schemes)
    per_scheme = {s: [] for s in schemes}
    for seed in seeds:
        cmp = compare_schemes(dataclasses.replace(config, master_seed=seed), schemes, backend=backend)
        for s, res in cmp["results"].items():
            per_scheme[s].append(res.summary | {"seed": seed, "population_digest": cmp["population_digest"]})
    report = {}
    for s, summaries in per_scheme.items():
        report[s] = {
            "runs": summaries,
            "median_iterations_to_convergence": median_iterations(
                [r["iterations_to_convergence"] for r in summaries]),
            "converged_runs": sum(r["converged"] for r in summaries),
            "median_converged_curator_payoff": float(np.median([r["converged_curator_payoff"] for r in summaries])),
            "median_converged_mean_delta_sigma": float(
                np.median([r["converged_mean_delta_sigma"] for r in summaries])),
            "median_converged_mean_price": float(np.median([r["converged_mean_price"] for r in summaries])),
        }
    return report
