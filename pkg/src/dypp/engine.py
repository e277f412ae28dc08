"""Repeated play of the pricing game between the curator and N data owners.

Each DO ``n`` is paired with its own curator-side learner, so the game splits
into N independent two-player games that only meet in the aggregate trace
columns.  Both sides move simultaneously: the DO's state is the price it was
offered last round and the curator learner's state is the noise saving the
DO chose last round.  Round 1 starts from state 0 on both sides.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .game_model import (ActionGrids, DOProfile, EconParams, LossModelParams,
                         curator_payoff_matrix, do_payoff_matrix)
from .kernels import KIND_CODES, get_kernel
from .learners import SCHEMES, WOLF_PHC, EpsilonSchedule, LearnerState, WolfParams
from .privacy import privacy_report

# spawn keys of the per-purpose random streams
_POPULATION_STREAM, _DO_STREAM, _CURATOR_STREAM = 0, 1, 2


@dataclass(frozen=True)
class GameConfig:
    N: int = 100
    grids: ActionGrids = field(default_factory=ActionGrids)
    econ: EconParams = field(default_factory=EconParams)
    loss_params: LossModelParams = field(default_factory=LossModelParams)
    c_range: tuple[float, float] = (0.5, 4.0)
    beta_range: tuple[float, float] = (0.05, 20.0)
    beta_sampling: str = "log-uniform"
    batch_size: int = 64
    lipschitz: float = 1.0
    data_size: int = 600
    do_profiles: tuple[DOProfile, ...] | None = None
    do_scheme: str = WOLF_PHC
    curator_scheme: str = WOLF_PHC
    do_wolf: WolfParams = field(default_factory=WolfParams)
    curator_wolf: WolfParams = field(default_factory=WolfParams)
    epsilon: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    iterations: int = 20_000
    master_seed: int = 0
    window: int = 100
    threshold: float = 1e-3
    early_stop: bool = True
    workers: int = 1
    block: int = 256

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations!r}")
        lo, hi = self.c_range
        if not 0 < lo <= hi:
            raise ValueError(f"c_range must satisfy 0 < c_min <= c_max, got {self.c_range!r}")
        lo, hi = self.beta_range
        if not 0 < lo <= hi:
            raise ValueError(f"beta_range must satisfy 0 < beta_min <= beta_max, got {self.beta_range!r}")
        if self.beta_sampling not in ("log-uniform", "uniform"):
            raise ValueError(f"beta_sampling must be 'log-uniform' or 'uniform', got {self.beta_sampling!r}")
        for side in ("do_scheme", "curator_scheme"):
            if getattr(self, side) not in SCHEMES:
                raise ValueError(f"{side} must be one of {SCHEMES}, got {getattr(self, side)!r}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed!r}")
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window!r}")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be > 0, got {self.threshold!r}")
        if self.workers < 1 or self.block < 1:
            raise ValueError("workers and block must be >= 1")
        if self.do_profiles is not None and len(self.do_profiles) != self.N:
            raise ValueError(f"do_profiles has {len(self.do_profiles)} entries but N={self.N}")
        if self.loss_params.sigma_max != self.grids.sigma_max:
            raise ValueError("loss_params.sigma_max must equal grids.sigma_max")


def sample_profiles(config: GameConfig) -> tuple[DOProfile, ...]:
    """DO population drawn from ``master_seed`` only, so every scheme sees the same DOs."""
    if config.do_profiles is not None:
        return tuple(config.do_profiles)
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(config.master_seed, spawn_key=(_POPULATION_STREAM,))))
    c_lo, c_hi = config.c_range
    b_lo, b_hi = config.beta_range
    costs = rng.uniform(c_lo, c_hi, config.N)
    if config.beta_sampling == "log-uniform":
        betas = np.exp(rng.uniform(math.log(b_lo), math.log(b_hi), config.N))
    else:
        betas = rng.uniform(b_lo, b_hi, config.N)
    # degenerate ranges must reproduce the bound exactly
    if c_lo == c_hi:
        costs[:] = c_lo
    if b_lo == b_hi:
        betas[:] = b_lo
    return tuple(
        DOProfile(c_n=float(c), beta_n=float(b), X_n=config.batch_size, L_lip=config.lipschitz,
                  D_n=config.data_size)
        for c, b in zip(costs, betas)
    )


def agent_stream(master_seed: int, side: str, n: int) -> np.random.Generator:
    """Independent random stream of agent ``n`` on ``side`` ('do' or 'curator')."""
    key = {"do": _DO_STREAM, "curator": _CURATOR_STREAM}[side]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(key, n))))


class _Side:
    """Learner tables of one side for all N agents, stacked along axis 0."""

    def __init__(self, n_agents: int, num_states: int, num_actions: int):
        self.q = np.zeros((n_agents, num_states, num_actions))
        self.pi = np.full((n_agents, num_states, num_actions), 1.0 / num_actions)
        self.avg = self.pi.copy()
        self.count = np.zeros((n_agents, num_states), dtype=np.int64)
        self.state = np.zeros(n_agents, dtype=np.int64)

    def learner(self, n: int) -> LearnerState:
        return LearnerState(self.q[n], self.pi[n], self.avg[n], self.count[n])

    def arrays(self):
        return self.q, self.pi, self.avg, self.count, self.state

    def copy_arrays(self):
        return tuple(a.copy() for a in self.arrays())

    def restore(self, saved):
        for dst, src in zip(self.arrays(), saved):
            dst[...] = src


@dataclass
class IterationRecord:
    t: int
    price_index: np.ndarray
    noise_index: np.ndarray
    do_reward: np.ndarray
    curator_reward: np.ndarray
    alpha: np.ndarray
    mean_delta_sigma: float
    mean_price: float
    curator_total: float


class EngineState:
    """Everything needed to continue the repeated game from iteration ``t + 1``."""

    def __init__(self, config: GameConfig, backend: str | None = None):
        self.config = config
        self.backend = backend
        self.kernel = get_kernel(backend)
        g = config.grids
        self.profiles = sample_profiles(config)
        self.do = _Side(config.N, g.num_prices, g.num_savings)
        self.curator = _Side(config.N, g.num_savings, g.num_prices)
        self.do_payoffs = np.ascontiguousarray(
            [do_payoff_matrix(p, config.econ, g) for p in self.profiles])
        # curator learners index their table as [observed saving, own price]
        self.curator_payoffs = np.ascontiguousarray(
            [curator_payoff_matrix(p, config.econ, config.loss_params, g).T for p in self.profiles])
        self.alpha_table = np.array(
            [[privacy_report(j, p, g).alpha for j in range(g.num_savings)] for p in self.profiles])
        self.prices = g.prices()
        self.savings = g.savings()
        self.do_rngs = [agent_stream(config.master_seed, "do", n) for n in range(config.N)]
        self.curator_rngs = [agent_stream(config.master_seed, "curator", n) for n in range(config.N)]
        self.t = 0

    def do_learner(self, n: int) -> LearnerState:
        return self.do.learner(n)

    def curator_learner(self, n: int) -> LearnerState:
        return self.curator.learner(n)

    def snapshot(self):
        return (self.t, self.do.copy_arrays(), self.curator.copy_arrays(),
                [r.bit_generator.state for r in self.do_rngs],
                [r.bit_generator.state for r in self.curator_rngs])

    def restore(self, snap) -> None:
        t, do, cur, do_rng, cur_rng = snap
        self.t = t
        self.do.restore(do)
        self.curator.restore(cur)
        for r, s in zip(self.do_rngs, do_rng):
            r.bit_generator.state = s
        for r, s in zip(self.curator_rngs, cur_rng):
            r.bit_generator.state = s

    def _schedules(self, t0: int, n_iter: int):
        cfg = self.config
        ts = np.arange(t0, t0 + n_iter, dtype=np.int64)
        psi_w = np.stack([cfg.do_wolf.psi_w(ts), cfg.curator_wolf.psi_w(ts)])
        psi_l = np.stack([cfg.do_wolf.psi_l(ts), cfg.curator_wolf.psi_l(ts)])
        eps = np.stack([cfg.epsilon(ts)] * 2)
        return psi_w, psi_l, eps

    def advance(self, n_iter: int) -> tuple[np.ndarray, np.ndarray]:
        """Play ``n_iter`` rounds; returns (price indices, noise indices), each shaped (n_iter, N)."""
        cfg = self.config
        N = cfg.N
        t0 = self.t + 1
        # every agent consumes two uniforms per round whatever its scheme
        u_do = np.ascontiguousarray([r.random((n_iter, 2)) for r in self.do_rngs])
        u_cur = np.ascontiguousarray([r.random((n_iter, 2)) for r in self.curator_rngs])
        psi_w, psi_l, eps = self._schedules(t0, n_iter)
        eta = np.array([cfg.do_wolf.eta, cfg.curator_wolf.eta])
        phi = np.array([cfg.do_wolf.phi, cfg.curator_wolf.phi])
        act_do = np.zeros((n_iter, N), dtype=np.int64)
        act_cur = np.zeros((n_iter, N), dtype=np.int64)
        kind_do, kind_cur = KIND_CODES[cfg.do_scheme], KIND_CODES[cfg.curator_scheme]

        def run(lo, hi):
            self.kernel(t0, n_iter, lo, hi, kind_do, kind_cur,
                        self.do.state, self.curator.state,
                        self.do.q, self.do.pi, self.do.avg, self.do.count,
                        self.curator.q, self.curator.pi, self.curator.avg, self.curator.count,
                        self.do_payoffs, self.curator_payoffs, u_do, u_cur,
                        eta, phi, psi_w, psi_l, eps, act_do, act_cur)

        workers = min(cfg.workers, N)
        if workers == 1:
            run(0, N)
        else:
            bounds = np.linspace(0, N, workers + 1).astype(int)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run, bounds[:-1], bounds[1:]))
        self.t += n_iter
        return act_cur, act_do


def init_population(config: GameConfig, backend: str | None = None) -> EngineState:
    return EngineState(config, backend)


class Trace:
    """Per-iteration, per-DO realized actions and the quantities derived from them."""

    def __init__(self, state: EngineState, price_index: np.ndarray, noise_index: np.ndarray, t0: int = 1):
        n = np.arange(price_index.shape[1])
        self.t = np.arange(t0, t0 + price_index.shape[0])
        self.price_index = price_index
        self.noise_index = noise_index
        self.do_reward = state.do_payoffs[n, price_index, noise_index]
        self.curator_reward = state.curator_payoffs[n, noise_index, price_index]
        self.alpha = state.alpha_table[n, noise_index]
        self.price = state.prices[price_index]
        self.delta_sigma = state.savings[noise_index]
        self.mean_delta_sigma = self.delta_sigma.mean(axis=1)
        self.mean_price = self.price.mean(axis=1)
        self.curator_total = self.curator_reward.sum(axis=1)

    def __len__(self) -> int:
        return len(self.t)

    def record(self, i: int) -> IterationRecord:
        return IterationRecord(
            t=int(self.t[i]), price_index=self.price_index[i], noise_index=self.noise_index[i],
            do_reward=self.do_reward[i], curator_reward=self.curator_reward[i], alpha=self.alpha[i],
            mean_delta_sigma=float(self.mean_delta_sigma[i]), mean_price=float(self.mean_price[i]),
            curator_total=float(self.curator_total[i]),
        )

    def records(self):
        return [self.record(i) for i in range(len(self))]


def run_iteration(t: int, state: EngineState) -> IterationRecord:
    if t != state.t + 1:
        raise ValueError(f"engine is at iteration {state.t}; next iteration is {state.t + 1}, not {t}")
    prices, noises = state.advance(1)
    return Trace(state, prices, noises, t0=t).record(0)


def convergence_detector(mean_delta_sigma, mean_price, window: int, threshold: float) -> tuple[bool, int | None]:
    """First iteration (1-based) ending a window in which both series vary by less than ``threshold``.

    Variation is the max absolute difference between any two points of the
    window, i.e. its range.
    """
    a = np.asarray(mean_delta_sigma, dtype=float)
    b = np.asarray(mean_price, dtype=float)
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    if len(a) != len(b):
        raise ValueError("series lengths differ")
    if len(a) < window:
        return False, None
    va = np.lib.stride_tricks.sliding_window_view(a, window)
    vb = np.lib.stride_tricks.sliding_window_view(b, window)
    flat = (np.ptp(va, axis=1) < threshold) & (np.ptp(vb, axis=1) < threshold)
    hits = np.flatnonzero(flat)
    if len(hits) == 0:
        return False, None
    return True, int(hits[0]) + window


@dataclass
class SimulationResult:
    config: GameConfig
    state: EngineState
    trace: Trace
    summary: dict


def _summarize(config: GameConfig, trace: Trace, converged: bool, t_conv: int | None) -> dict:
    tail = slice(max(0, len(trace) - config.window), len(trace))
    return {
        "scheme": {"do": config.do_scheme, "curator": config.curator_scheme},
        "iterations_run": len(trace),
        "converged": converged,
        "iterations_to_convergence": t_conv,
        "converged_mean_delta_sigma": float(trace.mean_delta_sigma[tail].mean()),
        "converged_mean_price": float(trace.mean_price[tail].mean()),
        "converged_curator_payoff": float(trace.curator_total[tail].mean()),
        "converged_do_payoff": float(trace.do_reward[tail].sum(axis=1).mean()),
        "cumulative_curator_payoff": float(trace.curator_total.sum()),
        "cumulative_do_payoff": float(trace.do_reward.sum()),
    }


def run_simulation(config: GameConfig, backend: str | None = None) -> SimulationResult:
    """Play up to ``config.iterations`` rounds, stopping at convergence when ``early_stop`` is set."""
    state = init_population(config, backend)
    T, W = config.iterations, config.window
    prices = np.zeros((T, config.N), dtype=np.int64)
    noises = np.zeros((T, config.N), dtype=np.int64)
    mean_sigma = np.zeros(T)
    mean_price = np.zeros(T)
    done, converged, t_conv = 0, False, None
    while done < T:
        n_iter = min(config.block, T - done)
        snap = state.snapshot() if config.early_stop else None
        p_blk, j_blk = state.advance(n_iter)
        prices[done:done + n_iter] = p_blk
        noises[done:done + n_iter] = j_blk
        mean_sigma[done:done + n_iter] = state.savings[j_blk].mean(axis=1)
        mean_price[done:done + n_iter] = state.prices[p_blk].mean(axis=1)
        end = done + n_iter
        if not converged:
            # only windows ending inside this block are new
            start = max(0, done - W + 1)
            hit, t_local = convergence_detector(mean_sigma[start:end], mean_price[start:end], W,
                                                config.threshold)
            if hit:
                converged, t_conv = True, start + t_local
        if converged and config.early_stop:
            if t_conv < end:
                # replay the block up to the convergence iteration so the state matches the trace
                state.restore(snap)
                redo = t_conv - done
                if redo > 0:
                    p_blk, j_blk = state.advance(redo)
                    assert np.array_equal(p_blk, prices[done:t_conv])
                    assert np.array_equal(j_blk, noises[done:t_conv])
            done = t_conv
            break
        done = end
    trace = Trace(state, prices[:done], noises[:done])
    return SimulationResult(config, state, trace, _summarize(config, trace, converged, t_conv))
