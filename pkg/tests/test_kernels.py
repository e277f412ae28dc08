import dataclasses

import numpy as np
import pytest

from dypp.engine import GameConfig, agent_stream, init_population, run_simulation
from dypp.kernels import BACKENDS, DEFAULT_BACKEND, get_kernel
from dypp.learners import SCHEMES

needs_compiled = pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")


def small(**kw):
    base = dict(N=4, iterations=700, early_stop=False, block=64)
    base.update(kw)
    return GameConfig(**base)


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_kernel("fortran")
    assert DEFAULT_BACKEND in BACKENDS


def test_block_draws_match_sequential():
    a = agent_stream(11, "do", 3).random((50, 2))
    r = agent_stream(11, "do", 3)
    b = np.array([[r.random(), r.random()] for _ in range(50)])
    assert np.array_equal(a, b)


def test_streams_are_distinct():
    draws = {(side, n): agent_stream(5, side, n).random() for side in ("do", "curator") for n in range(3)}
    assert len(set(draws.values())) == 6


@needs_compiled
@pytest.mark.parametrize("do_scheme", SCHEMES)
@pytest.mark.parametrize("cur_scheme", SCHEMES)
def test_backends_bit_identical(do_scheme, cur_scheme):
    cfg = small(do_scheme=do_scheme, curator_scheme=cur_scheme, master_seed=3)
    fast = run_simulation(cfg, "compiled")
    slow = run_simulation(cfg, "python")
    assert np.array_equal(fast.trace.price_index, slow.trace.price_index)
    assert np.array_equal(fast.trace.noise_index, slow.trace.noise_index)
    for side in ("do", "curator"):
        for a, b in zip(getattr(fast.state, side).arrays(), getattr(slow.state, side).arrays()):
            assert np.array_equal(a, b)


@needs_compiled
def test_backends_identical_with_early_stop():
    cfg = GameConfig(N=3, iterations=3000, do_scheme="greedy", curator_scheme="greedy", master_seed=8, block=50)
    fast, slow = run_simulation(cfg, "compiled"), run_simulation(cfg, "python")
    assert fast.summary == slow.summary


@pytest.mark.parametrize("block", [1, 7, 256])
def test_block_size_does_not_change_trace(block):
    ref = run_simulation(small(block=500))
    other = run_simulation(small(block=block))
    assert np.array_equal(ref.trace.price_index, other.trace.price_index)
    assert np.array_equal(ref.trace.noise_index, other.trace.noise_index)
    assert np.array_equal(ref.state.do.pi, other.state.do.pi)


def test_python_kernel_runs_directly():
    state = init_population(small(), backend="python")
    p, j = state.advance(5)
    assert p.shape == j.shape == (5, 4)
    assert state.t == 5
