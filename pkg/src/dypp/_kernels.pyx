# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled population kernel.

Mirrors ``_pykernels.run_block`` operation for operation; the arithmetic
order of every sum must stay in step with ``learners.py``.
"""
from libc.stdint cimport int64_t

cdef enum:
    KIND_WOLF = 0
    KIND_QLEARN = 1
    KIND_GREEDY = 2


cdef inline Py_ssize_t argmax_first(const double* v, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, best = 0
    cdef double best_val = v[0]
    for i in range(1, n):
        if v[i] > best_val:
            best = i
            best_val = v[i]
    return best


cdef inline double row_max(const double* v, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double m = v[0]
    for i in range(1, n):
        if v[i] > m:
            m = v[i]
    return m


cdef inline Py_ssize_t sample_categorical(const double* p, Py_ssize_t n, double u) noexcept nogil:
    cdef Py_ssize_t i, last = 0
    cdef double acc = 0.0
    for i in range(n):
        if p[i] > 0.0:
            last = i
        acc += p[i]
        if u < acc:
            return i
    return last


cdef inline Py_ssize_t uniform_index(double u, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i = <Py_ssize_t>(u * n)
    return i if i < n - 1 else n - 1


cdef inline double weighted(const double* p, const double* q, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double total = 0.0
    for i in range(n):
        total += p[i] * q[i]
    return total


cdef inline void hill_climb(double* p, Py_ssize_t n, Py_ssize_t greedy, double step) noexcept nogil:
    cdef Py_ssize_t i
    cdef double penalty, v, total = 0.0
    if n == 1:
        p[0] = 1.0
        return
    penalty = step / (n - 1)
    for i in range(n):
        if i == greedy:
            v = p[i] + step
        else:
            v = p[i] - penalty
        if v < 0.0:
            v = 0.0
        if v > 1.0:
            v = 1.0
        p[i] = v
    for i in range(n):
        total += p[i]
    for i in range(n):
        p[i] = p[i] / total


cdef inline void point_mass(double* p, Py_ssize_t n, Py_ssize_t a) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        p[i] = 0.0
    p[a] = 1.0


cdef inline Py_ssize_t select(int kind, long t, Py_ssize_t s, Py_ssize_t A,
                              const double* q, const double* pi, const double* pay,
                              double u0, double u1, double eps) noexcept nogil:
    if kind == KIND_WOLF:
        return sample_categorical(pi + s * A, A, u0)
    if kind == KIND_QLEARN:
        if u0 < eps:
            return uniform_index(u1, A)
        return argmax_first(q + s * A, A)
    if t == 1:
        return uniform_index(u0, A)
    return argmax_first(pay + s * A, A)


cdef inline void update(int kind, Py_ssize_t s, Py_ssize_t a, double r, Py_ssize_t s2, Py_ssize_t A,
                        double eta, double phi, double psi_w, double psi_l,
                        double* q, double* pi, double* avg, int64_t* cnt) noexcept nogil:
    cdef double* qs = q + s * A
    cdef double* ps = pi + s * A
    cdef double* avs = avg + s * A
    cdef double best_next, step
    cdef Py_ssize_t i
    cdef int64_t count
    if kind != KIND_GREEDY:
        best_next = row_max(q + s2 * A, A)
        qs[a] = (1.0 - eta) * qs[a] + eta * (r + phi * best_next)
    cnt[s] += 1
    count = cnt[s]
    if kind == KIND_WOLF:
        if weighted(ps, qs, A) <= weighted(avs, qs, A):
            step = psi_l
        else:
            step = psi_w
        hill_climb(ps, A, argmax_first(qs, A), step)
    elif kind == KIND_QLEARN:
        point_mass(ps, A, argmax_first(qs, A))
    else:
        point_mass(ps, A, a)
    for i in range(A):
        avs[i] = avs[i] + (ps[i] - avs[i]) / count


def run_block(long t0, Py_ssize_t n_iter, Py_ssize_t lo, Py_ssize_t hi, int kind_do, int kind_cur,
              int64_t[::1] do_state, int64_t[::1] cur_state,
              double[:, :, ::1] q_do, double[:, :, ::1] pi_do, double[:, :, ::1] avg_do,
              int64_t[:, ::1] cnt_do,
              double[:, :, ::1] q_cur, double[:, :, ::1] pi_cur, double[:, :, ::1] avg_cur,
              int64_t[:, ::1] cnt_cur,
              const double[:, :, ::1] pay_do, const double[:, :, ::1] pay_cur,
              const double[:, :, ::1] u_do, const double[:, :, ::1] u_cur,
              const double[::1] eta, const double[::1] phi,
              const double[:, ::1] psi_w, const double[:, ::1] psi_l, const double[:, ::1] eps,
              int64_t[:, ::1] act_do, int64_t[:, ::1] act_cur):
    """Play ``n_iter`` rounds starting at iteration ``t0`` for DO pairs ``lo..hi-1``.

    Releases the GIL, so disjoint ``[lo, hi)`` ranges may run on separate threads.
    """
    cdef Py_ssize_t A_do = q_do.shape[2]
    cdef Py_ssize_t A_cur = q_cur.shape[2]
    cdef Py_ssize_t n, i, sd, sc, a, b
    cdef long t
    if hi <= lo or n_iter <= 0:
        return
    with nogil:
        for n in range(lo, hi):
            sd = do_state[n]
            sc = cur_state[n]
            for i in range(n_iter):
                t = t0 + i
                a = select(kind_do, t, sd, A_do, &q_do[n, 0, 0], &pi_do[n, 0, 0], &pay_do[n, 0, 0],
                           u_do[n, i, 0], u_do[n, i, 1], eps[0, i])
                b = select(kind_cur, t, sc, A_cur, &q_cur[n, 0, 0], &pi_cur[n, 0, 0], &pay_cur[n, 0, 0],
                           u_cur[n, i, 0], u_cur[n, i, 1], eps[1, i])
                update(kind_do, sd, a, pay_do[n, b, a], b, A_do, eta[0], phi[0], psi_w[0, i], psi_l[0, i],
                       &q_do[n, 0, 0], &pi_do[n, 0, 0], &avg_do[n, 0, 0], &cnt_do[n, 0])
                update(kind_cur, sc, b, pay_cur[n, a, b], a, A_cur, eta[1], phi[1], psi_w[1, i], psi_l[1, i],
                       &q_cur[n, 0, 0], &pi_cur[n, 0, 0], &avg_cur[n, 0, 0], &cnt_cur[n, 0])
                act_do[i, n] = a
                act_cur[i, n] = b
                sd = b
                sc = a
            do_state[n] = sd
            cur_state[n] = sc
