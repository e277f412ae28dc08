"""Reading, resolving and printing simulation configs.

Configs are INI files.  Every key is optional; missing keys fall back to the
defaults below (the reference experiment setup).  Example::

    [grid]
    K = 32
    J = 12

    [learning]
    scheme = q-learning
    eta = 0.3

    [run]
    iterations = 5000
    seed = 7
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import json

from .engine import GameConfig
from .game_model import ActionGrids, EconParams, LossModelParams
from .learners import EpsilonSchedule, HarmonicSchedule, WolfParams


class ConfigError(ValueError):
    pass


def _floats(n):
    def parse(text):
        parts = [p for p in text.replace(",", " ").split()]
        if len(parts) != n:
            raise ValueError(f"expected {n} comma-separated numbers, got {text!r}")
        return tuple(float(p) for p in parts)
    return parse


def _bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text):
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {text!r}") from None
        return int(value)


SCHEMA = {
    "grid": {"K": _int, "J": _int, "p_max": float, "sigma_max": float},
    "econ": {k: float for k in ("lambda_r", "nu", "varpi", "lambda_s", "mu", "zeta_1", "zeta_2")},
    "loss": {"gamma": _floats(5)},
    "population": {"N": _int, "c_range": _floats(2), "beta_range": _floats(2), "beta_sampling": str.strip,
                   "batch_size": _int, "lipschitz": float, "data_size": _int},
    "learning": {"scheme": str.strip, "do_scheme": str.strip, "curator_scheme": str.strip,
                 "eta": float, "phi": float, "do_eta": float, "curator_eta": float,
                 "do_phi": float, "curator_phi": float, "psi_offset": float, "psi_scale": float,
                 "psi_l_multiplier": float, "epsilon_floor": float, "epsilon_scale": float},
    "run": {"iterations": _int, "seed": _int, "window": _int, "threshold": float,
            "early_stop": _bool, "workers": _int},
}


def valid_keys() -> list[str]:
    return [f"{section}.{key}" for section, keys in SCHEMA.items() for key in keys]


def parse_text(text: str) -> dict[str, dict]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    values: dict[str, dict] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; valid keys: {', '.join(valid_keys())}")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}; valid keys: {', '.join(valid_keys())}")
            try:
                values.setdefault(section, {})[key] = SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc
    return values


def build_config(values: dict[str, dict]) -> GameConfig:
    """Resolve parsed ``{section: {key: value}}`` overrides on top of the defaults."""
    g = values.get("grid", {})
    e = values.get("econ", {})
    lo = values.get("loss", {})
    p = values.get("population", {})
    lr = values.get("learning", {})
    r = values.get("run", {})
    try:
        grids = ActionGrids(**g)
        econ = EconParams(**e)
        loss = LossModelParams(gamma=lo.get("gamma", LossModelParams.gamma), sigma_max=grids.sigma_max)
        schedule = HarmonicSchedule(offset=lr.get("psi_offset", 50.0), scale=lr.get("psi_scale", 50.0))
        multiplier = lr.get("psi_l_multiplier", 2.0)

        def wolf(side):
            return WolfParams(eta=lr.get(f"{side}_eta", lr.get("eta", 0.5)),
                              phi=lr.get(f"{side}_phi", lr.get("phi", 0.8)),
                              psi_w_schedule=schedule, psi_l_multiplier=multiplier)

        scheme = lr.get("scheme", "wolf-phc")
        return GameConfig(
            N=p.get("N", 100), grids=grids, econ=econ, loss_params=loss,
            c_range=p.get("c_range", (0.5, 4.0)), beta_range=p.get("beta_range", (0.05, 20.0)),
            beta_sampling=p.get("beta_sampling", "log-uniform"), batch_size=p.get("batch_size", 64),
            lipschitz=p.get("lipschitz", 1.0), data_size=p.get("data_size", 600),
            do_scheme=lr.get("do_scheme", scheme), curator_scheme=lr.get("curator_scheme", scheme),
            do_wolf=wolf("do"), curator_wolf=wolf("curator"),
            epsilon=EpsilonSchedule(floor=lr.get("epsilon_floor", 0.05), scale=lr.get("epsilon_scale", 200.0)),
            iterations=r.get("iterations", 20_000), master_seed=r.get("seed", 0),
            window=r.get("window", 100), threshold=r.get("threshold", 1e-3),
            early_stop=r.get("early_stop", True), workers=r.get("workers", 1),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> GameConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return build_config(parse_text(text))


def with_overrides(config: GameConfig, seed=None, iterations=None, scheme=None) -> GameConfig:
    changes = {}
    if seed is not None:
        changes["master_seed"] = seed
    if iterations is not None:
        changes["iterations"] = iterations
    if scheme is not None:
        changes["do_scheme"] = changes["curator_scheme"] = scheme
    try:
        return dataclasses.replace(config, **changes)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def config_to_sections(config: GameConfig) -> dict[str, dict]:
    """Inverse of :func:`build_config` (explicit ``do_profiles`` are not representable)."""
    if config.do_profiles is not None:
        raise ConfigError("configs with explicit DO profiles cannot be written as INI")
    g, e, lp = config.grids, config.econ, config.loss_params
    return {
        "grid": {"K": g.K, "J": g.J, "p_max": g.p_max, "sigma_max": g.sigma_max},
        "econ": dataclasses.asdict(e),
        "loss": {"gamma": list(lp.gamma)},
        "population": {"N": config.N, "c_range": list(config.c_range), "beta_range": list(config.beta_range),
                       "beta_sampling": config.beta_sampling, "batch_size": config.batch_size,
                       "lipschitz": config.lipschitz, "data_size": config.data_size},
        "learning": {"do_scheme": config.do_scheme, "curator_scheme": config.curator_scheme,
                     "do_eta": config.do_wolf.eta, "curator_eta": config.curator_wolf.eta,
                     "do_phi": config.do_wolf.phi, "curator_phi": config.curator_wolf.phi,
                     "psi_offset": config.do_wolf.psi_w_schedule.offset,
                     "psi_scale": config.do_wolf.psi_w_schedule.scale,
                     "psi_l_multiplier": config.do_wolf.psi_l_multiplier,
                     "epsilon_floor": config.epsilon.floor, "epsilon_scale": config.epsilon.scale},
        "run": {"iterations": config.iterations, "seed": config.master_seed, "window": config.window,
                "threshold": config.threshold, "early_stop": config.early_stop, "workers": config.workers},
    }


def config_hash(config: GameConfig) -> str:
    """Digest of everything that affects the trace (``workers`` does not)."""
    sections = config_to_sections(config)
    sections["run"] = {k: v for k, v in sections["run"].items() if k != "workers"}
    blob = json.dumps(sections, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(repr(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def format_config(config: GameConfig) -> str:
    if (config.do_wolf.psi_w_schedule != config.curator_wolf.psi_w_schedule
            or config.do_wolf.psi_l_multiplier != config.curator_wolf.psi_l_multiplier):
        raise ConfigError("per-side step-size schedules cannot be written as INI")
    out = io.StringIO()
    for section, keys in config_to_sections(config).items():
        out.write(f"[{section}]\n")
        for key, value in keys.items():
            out.write(f"{key} = {_fmt(value)}\n")
        out.write("\n")
    return out.getvalue()
