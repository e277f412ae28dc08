"""Pure-Python population kernel, used when the compiled extension is unavailable.

Same signature and bit-identical results as ``_kernels.run_block``.  Each
agent's arrays are wrapped as :class:`~dypp.learners.LearnerState` views so
the public learner operations do the work.
"""
from __future__ import annotations

from . import learners as lrn

KIND_WOLF, KIND_QLEARN, KIND_GREEDY = 0, 1, 2


def _select(kind, t, state, learner, pay, u, eps):
    if kind == KIND_WOLF:
        return lrn.sample_categorical(learner.policy[state].tolist(), float(u[0]))
    if kind == KIND_QLEARN:
        return lrn._epsilon_greedy(learner.q_table[state].tolist(), eps, float(u[0]), float(u[1]))
    if t == 1:
        return lrn.uniform_index(float(u[0]), learner.num_actions)
    return lrn.greedy_select(state, lambda opp: pay[opp].tolist())


def _update(kind, state, action, reward, next_state, params, psi_w, psi_l, learner):
    if kind != KIND_GREEDY:
        lrn.q_update(state, action, reward, next_state, params, learner)
    learner.visit_count[state] += 1
    if kind == KIND_WOLF:
        step = psi_l if lrn.is_losing(state, learner) else psi_w
        lrn.phc_policy_update(state, step, learner)
    elif kind == KIND_QLEARN:
        lrn.set_point_mass(state, lrn.argmax_first(learner.q_table[state].tolist()), learner)
    else:
        lrn.set_point_mass(state, action, learner)
    lrn.avg_policy_update(state, learner)


def run_block(t0, n_iter, lo, hi, kind_do, kind_cur, do_state, cur_state,
              q_do, pi_do, avg_do, cnt_do, q_cur, pi_cur, avg_cur, cnt_cur,
              pay_do, pay_cur, u_do, u_cur, eta, phi, psi_w, psi_l, eps,
              act_do, act_cur):
    p_do = lrn.WolfParams(eta=float(eta[0]), phi=float(phi[0]))
    p_cur = lrn.WolfParams(eta=float(eta[1]), phi=float(phi[1]))
    for n in range(lo, hi):
        do = lrn.LearnerState(q_do[n], pi_do[n], avg_do[n], cnt_do[n])
        cur = lrn.LearnerState(q_cur[n], pi_cur[n], avg_cur[n], cnt_cur[n])
        sd, sc = int(do_state[n]), int(cur_state[n])
        for i in range(n_iter):
            t = t0 + i
            a = _select(kind_do, t, sd, do, pay_do[n], u_do[n, i], float(eps[0, i]))
            b = _select(kind_cur, t, sc, cur, pay_cur[n], u_cur[n, i], float(eps[1, i]))
            _update(kind_do, sd, a, float(pay_do[n, b, a]), b, p_do,
                    float(psi_w[0, i]), float(psi_l[0, i]), do)
            _update(kind_cur, sc, b, float(pay_cur[n, a, b]), a, p_cur,
                    float(psi_w[1, i]), float(psi_l[1, i]), cur)
            act_do[i, n] = a
            act_cur[i, n] = b
            sd, sc = b, a
        do_state[n] = sd
        cur_state[n] = sc
