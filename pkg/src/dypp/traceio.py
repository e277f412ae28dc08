"""Trace CSV, summary/manifest JSON and learner-state snapshots."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

TRACE_COLUMNS = ("t", "do_id", "price_index", "price", "noise_index", "delta_sigma", "sigma", "alpha",
                 "do_reward", "curator_reward_n", "mean_delta_sigma", "mean_price", "curator_total")


class TraceIOError(OSError):
    pass


def fmt(x: float) -> str:
    """Nine significant digits; infinite budgets print as ``inf``."""
    return format(float(x), ".9g")


def write_trace(trace, path, grids) -> Path:
    """One CSV row per (iteration, DO), ordered by iteration then DO id."""
    path = Path(path)
    T, N = trace.price_index.shape
    sigma = grids.sigma_max - trace.delta_sigma
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_COLUMNS)
            for i in range(T):
                t = int(trace.t[i])
                agg = (fmt(trace.mean_delta_sigma[i]), fmt(trace.mean_price[i]), fmt(trace.curator_total[i]))
                w.writerows(
                    (t, n, int(trace.price_index[i, n]), fmt(trace.price[i, n]), int(trace.noise_index[i, n]),
                     fmt(trace.delta_sigma[i, n]), fmt(sigma[i, n]), fmt(trace.alpha[i, n]),
                     fmt(trace.do_reward[i, n]), fmt(trace.curator_reward[i, n]), *agg)
                    for n in range(N)
                )
    except OSError as exc:
        raise TraceIOError(f"cannot write trace to {path}: {exc}") from exc
    return path


def read_trace(path) -> list[dict]:
    ints = {"t", "do_id", "price_index", "noise_index"}
    try:
        with open(path, newline="", encoding="ascii") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise TraceIOError(f"cannot read trace {path}: {exc}") from exc
    return [{k: int(v) if k in ints else float(v) for k, v in row.items()} for row in rows]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if math.isnan(obj) else (str(float(obj)) if math.isinf(obj) else float(obj))
    return obj


def write_json(obj, path) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise TraceIOError(f"cannot write {path}: {exc}") from exc
    return path


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TraceIOError(f"cannot read {path}: {exc}") from exc


def save_state(state, path) -> Path:
    """Learner tables of a finished run, enough for exploitability analysis."""
    path = Path(path)
    np.savez_compressed(
        path, t=state.t,
        do_q=state.do.q, do_pi=state.do.pi, do_avg=state.do.avg, do_count=state.do.count, do_state=state.do.state,
        cur_q=state.curator.q, cur_pi=state.curator.pi, cur_avg=state.curator.avg,
        cur_count=state.curator.count, cur_state=state.curator.state,
    )
    return path


def load_state(state, path):
    """Overwrite the learner tables of a freshly initialized ``state`` from a snapshot file."""
    try:
        data = np.load(path)
    except OSError as exc:
        raise TraceIOError(f"cannot read state {path}: {exc}") from exc
    state.t = int(data["t"])
    for side, prefix in ((state.do, "do"), (state.curator, "cur")):
        for name in ("q", "pi", "avg", "count", "state"):
            target = getattr(side, name)
            src = data[f"{prefix}_{name}"]
            if src.shape != target.shape:
                raise ValueError(f"snapshot {prefix}_{name} has shape {src.shape}, expected {target.shape}")
            target[...] = src
    return state
