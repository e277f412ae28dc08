"""Tabular learners used by both sides of the game.

Each learner observes the opponent's previous action as its state.  The
WoLF-PHC learner hill-climbs a mixed policy with a step that is larger while
it is losing (its policy does worse against its own Q-values than its
running average policy).  Q-learning with epsilon-greedy exploration and a
myopic best-response player serve as baselines.

All update operations mutate the :class:`LearnerState` in place and return
it.  Arithmetic is done element by element on Python floats, in index order,
so that the compiled kernel in ``_kernels.pyx`` reproduces it bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

WOLF_PHC = "wolf-phc"
Q_LEARNING = "q-learning"
GREEDY = "greedy"
SCHEMES = (WOLF_PHC, Q_LEARNING, GREEDY)


@dataclass(frozen=True)
class HarmonicSchedule:
    """Step size ``1 / (offset + t / scale)``."""

    offset: float = 50.0
    scale: float = 50.0

    def __call__(self, t):
        """Works elementwise on integer arrays as well as scalars."""
        return 1.0 / (self.offset + t / self.scale)


@dataclass(frozen=True)
class EpsilonSchedule:
    """Exploration rate ``max(floor, 1 / (1 + t / scale))``."""

    floor: float = 0.05
    scale: float = 200.0

    def __call__(self, t):
        if isinstance(t, np.ndarray):
            return np.maximum(self.floor, 1.0 / (1.0 + t / self.scale))
        return max(self.floor, 1.0 / (1.0 + t / self.scale))


@dataclass(frozen=True)
class WolfParams:
    eta: float = 0.5
    phi: float = 0.8
    psi_w_schedule: HarmonicSchedule = field(default_factory=HarmonicSchedule)
    psi_l_multiplier: float = 2.0

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not 0 < self.phi <= 1:
            raise ValueError(f"phi must lie in (0, 1], got {self.phi!r}")
        if not self.psi_l_multiplier > 1:
            raise ValueError(f"psi_l_multiplier must be > 1, got {self.psi_l_multiplier!r}")

    def psi_w(self, t: int) -> float:
        return self.psi_w_schedule(t)

    def psi_l(self, t: int) -> float:
        return self.psi_l_multiplier * self.psi_w_schedule(t)


@dataclass
class LearnerState:
    q_table: np.ndarray
    policy: np.ndarray
    avg_policy: np.ndarray
    visit_count: np.ndarray

    @classmethod
    def create(cls, num_states: int, num_actions: int) -> "LearnerState":
        uniform = np.full((num_states, num_actions), 1.0 / num_actions)
        return cls(
            q_table=np.zeros((num_states, num_actions)),
            policy=uniform,
            avg_policy=uniform.copy(),
            visit_count=np.zeros(num_states, dtype=np.int64),
        )

    @property
    def num_states(self) -> int:
        return self.q_table.shape[0]

    @property
    def num_actions(self) -> int:
        return self.q_table.shape[1]

    def _check_state(self, state: int) -> None:
        if not 0 <= state < self.num_states:
            raise IndexError(f"state {state} outside [0, {self.num_states})")

    def _check_action(self, action: int) -> None:
        if not 0 <= action < self.num_actions:
            raise IndexError(f"action {action} outside [0, {self.num_actions})")


def argmax_first(values) -> int:
    """Index of the largest value; ties go to the lowest index."""
    best, best_val = 0, values[0]
    for i in range(1, len(values)):
        if values[i] > best_val:
            best, best_val = i, values[i]
    return best


def sample_categorical(probs, u: float) -> int:
    """Inverse-CDF draw from ``probs`` with a uniform ``u`` in [0, 1)."""
    acc = 0.0
    last = 0
    for i, p in enumerate(probs):
        if p > 0.0:
            last = i
        acc += p
        if u < acc:
            return i
    # u landed in the rounding gap above the final partial sum
    return last


def uniform_index(u: float, n: int) -> int:
    return min(int(u * n), n - 1)


def q_update(state: int, action: int, reward: float, next_state: int, params: WolfParams,
             learner: LearnerState) -> LearnerState:
    learner._check_state(state)
    learner._check_state(next_state)
    learner._check_action(action)
    q = learner.q_table
    best_next = max(q[next_state].tolist())
    old = float(q[state, action])
    q[state, action] = (1.0 - params.eta) * old + params.eta * (reward + params.phi * best_next)
    return learner


def _hill_climb(row: list, greedy: int, step: float) -> list:
    n = len(row)
    if n == 1:
        return [1.0]
    penalty = step / (n - 1)
    moved = [p + step if a == greedy else p - penalty for a, p in enumerate(row)]
    clipped = [0.0 if p < 0.0 else (1.0 if p > 1.0 else p) for p in moved]
    total = 0.0
    for p in clipped:
        total += p
    return [p / total for p in clipped]


def phc_policy_update(state: int, step: float, learner: LearnerState) -> LearnerState:
    """Move ``step`` of probability mass onto the greedy action, taken evenly from the rest."""
    learner._check_state(state)
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step!r}")
    greedy = argmax_first(learner.q_table[state].tolist())
    learner.policy[state] = _hill_climb(learner.policy[state].tolist(), greedy, step)
    return learner


def _weighted(probs: list, q: list) -> float:
    total = 0.0
    for p, v in zip(probs, q):
        total += p * v
    return total


def is_losing(state: int, learner: LearnerState) -> bool:
    """True when the current policy's value under Q does not beat the average policy's."""
    learner._check_state(state)
    q = learner.q_table[state].tolist()
    current = _weighted(learner.policy[state].tolist(), q)
    average = _weighted(learner.avg_policy[state].tolist(), q)
    return current <= average


def wolf_step_size(state: int, t: int, params: WolfParams, learner: LearnerState) -> float:
    return params.psi_l(t) if is_losing(state, learner) else params.psi_w(t)


def avg_policy_update(state: int, learner: LearnerState) -> LearnerState:
    learner._check_state(state)
    count = int(learner.visit_count[state])
    if count < 1:
        raise ValueError(f"state {state} has not been visited; count must be >= 1")
    avg = learner.avg_policy[state].tolist()
    pol = learner.policy[state].tolist()
    learner.avg_policy[state] = [a + (p - a) / count for a, p in zip(avg, pol)]
    return learner


def select_action(state: int, learner: LearnerState, rng_stream) -> int:
    """Sample from the policy row of ``state``.

    ``rng_stream`` is anything with a ``random()`` method returning a float in
    [0, 1), e.g. ``numpy.random.Generator`` or ``random.Random``.
    """
    learner._check_state(state)
    return sample_categorical(learner.policy[state].tolist(), float(rng_stream.random()))


def _epsilon_greedy(q_row: list, eps: float, u_explore: float, u_action: float) -> int:
    if u_explore < eps:
        return uniform_index(u_action, len(q_row))
    return argmax_first(q_row)


def qlearning_select(state: int, t: int, epsilon_schedule, learner: LearnerState, rng_stream) -> int:
    learner._check_state(state)
    u_explore = float(rng_stream.random())
    u_action = float(rng_stream.random())
    return _epsilon_greedy(learner.q_table[state].tolist(), epsilon_schedule(t), u_explore, u_action)


def greedy_select(opponent_last_action: int, payoff_row_evaluator) -> int:
    """Best response to the opponent's last action.

    ``payoff_row_evaluator(opponent_action)`` returns the realized payoff of
    every own action against that opponent action.
    """
    return argmax_first(list(payoff_row_evaluator(opponent_last_action)))


def set_point_mass(state: int, action: int, learner: LearnerState) -> LearnerState:
    """Record a deterministic choice as the policy row (used by the baselines)."""
    row = [0.0] * learner.num_actions
    row[action] = 1.0
    learner.policy[state] = row
    return learner
