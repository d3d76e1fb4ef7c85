# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled annealing loops. Must stay step-for-step identical to ``_fallback.py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

N_COUNTERS = 6


cdef inline void _draw_flips(cnp.int64_t[::1] perm, const cnp.int64_t[:, ::1] draws,
                             Py_ssize_t it, int t) noexcept nogil:
    cdef int a
    cdef cnp.int64_t j, tmp
    for a in range(t):
        j = a + draws[it, a]
        tmp = perm[a]
        perm[a] = perm[j]
        perm[j] = tmp


cdef inline double _quad(const double[:, ::1] J, const double[::1] x, Py_ssize_t n) noexcept nogil:
    # x^T J x with four partial sums per row
    cdef Py_ssize_t i, j, n4 = n - n % 4
    cdef double a0, a1, a2, a3, total = 0.0
    for i in range(n):
        a0 = a1 = a2 = a3 = 0.0
        for j in range(0, n4, 4):
            a0 += J[i, j] * x[j]
            a1 += J[i, j + 1] * x[j + 1]
            a2 += J[i, j + 2] * x[j + 2]
            a3 += J[i, j + 3] * x[j + 3]
        for j in range(n4, n):
            a0 += J[i, j] * x[j]
        total += x[i] * ((a0 + a1) + (a2 + a3))
    return total


cdef inline cnp.int64_t _busiest(cnp.int64_t[::1] perm, int t, int k, int g,
                                 cnp.int64_t[::1] scratch) noexcept nogil:
    # max number of the t*k active columns falling into one mux group
    cdef int a, b, c, cnt
    cdef cnp.int64_t best = 0
    cdef int nc = t * k
    for a in range(t):
        for b in range(k):
            scratch[a * k + b] = (perm[a] * k + b) // g
    for a in range(nc):
        cnt = 0
        for c in range(nc):
            if scratch[c] == scratch[a]:
                cnt += 1
        if cnt > best:
            best = cnt
    return best


def insitu_kernel(const double[:, ::1] J, signed char[::1] spins, double energy0,
                  const cnp.int64_t[:, ::1] draws, const double[::1] r, const double[::1] fvals,
                  double normalizer, int count_ops, int k, int g, int n_arrays):
    cdef Py_ssize_t n = J.shape[0]
    cdef Py_ssize_t iters = draws.shape[0]
    cdef int t = draws.shape[1]
    cdef Py_ssize_t it, i
    cdef int a
    cdef cnp.int64_t j
    cdef double x, acc, e, E = energy0, best = np.inf
    cdef long long accepts = 0, greedy = 0, nonpos = 0
    cdef long long npos = 0, fpos, rows_pos, rows_neg, R, C, passes
    cdef bint accept, any_cp, any_cn

    perm_a = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] perm = perm_a
    in_f_a = np.zeros(n, dtype=np.int8)
    cdef signed char[::1] in_f = in_f_a
    trace_a = np.empty(iters, dtype=np.float64)
    cdef double[::1] trace = trace_a
    best_a = np.array(spins, dtype=np.int8, copy=True)
    cdef signed char[::1] best_state = best_a
    counters_a = np.zeros(N_COUNTERS, dtype=np.int64)
    cdef cnp.int64_t[::1] counters = counters_a
    scratch_a = np.zeros(max(t * k, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] scratch = scratch_a

    for i in range(n):
        if spins[i] > 0:
            npos += 1

    with nogil:
        for it in range(iters):
            _draw_flips(perm, draws, it, t)
            for a in range(t):
                in_f[perm[a]] = 1
            x = 0.0
            for a in range(t):
                j = perm[a]
                acc = 0.0
                for i in range(n):
                    if not in_f[i]:
                        acc += J[j, i] * spins[i]
                x += (-spins[j]) * acc
            e = x / normalizer * fvals[it]

            if count_ops:
                fpos = 0
                any_cp = False
                any_cn = False
                for a in range(t):
                    if spins[perm[a]] > 0:
                        fpos += 1
                        any_cn = True
                    else:
                        any_cp = True
                rows_pos = npos - fpos
                rows_neg = (n - t) - rows_pos
                R = (rows_pos > 0) + (rows_neg > 0)
                C = any_cp + any_cn
                passes = R * C * n_arrays
                counters[0] += passes * t * k
                counters[1] += (n - t) * C * n_arrays * t * k
                counters[2] += passes
                counters[3] += (n - t) * C * n_arrays + passes * t * k
                if passes > 0:
                    counters[4] += passes * _busiest(perm, t, k, g, scratch)

            accept = False
            if e <= 0:
                accept = True
                greedy += 1
                nonpos += 1
            elif e <= r[it]:
                accept = True
            if accept:
                accepts += 1
                for a in range(t):
                    j = perm[a]
                    if spins[j] > 0:
                        npos -= 1
                    else:
                        npos += 1
                    spins[j] = -spins[j]
                E += 4.0 * x
            for a in range(t):
                in_f[perm[a]] = 0
            trace[it] = E
            if E < best:
                best = E
                for i in range(n):
                    best_state[i] = spins[i]

    return trace_a, best_a, best, accepts, greedy, nonpos, counters_a


def baseline_kernel(const double[:, ::1] J, signed char[::1] spins, double energy0,
                    const cnp.int64_t[:, ::1] draws, const double[::1] r, const double[::1] tnorm,
                    double energy_scale, int count_ops, int k, int g, int n_arrays):
    cdef Py_ssize_t n = J.shape[0]
    cdef Py_ssize_t iters = draws.shape[0]
    cdef int t = draws.shape[1]
    cdef Py_ssize_t it, i
    cdef int a
    cdef cnp.int64_t j
    cdef double e_new, d, E = energy0, best = np.inf
    cdef long long accepts = 0, greedy = 0, nonpos = 0
    cdef long long npos = 0, npos_new, passes
    cdef long long m = n * k
    cdef long long busiest = g if g < m else m
    cdef bint accept

    perm_a = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] perm = perm_a
    new_a = np.array(spins, dtype=np.float64, copy=True)
    cdef double[::1] new = new_a
    trace_a = np.empty(iters, dtype=np.float64)
    cdef double[::1] trace = trace_a
    best_a = np.array(spins, dtype=np.int8, copy=True)
    cdef signed char[::1] best_state = best_a
    counters_a = np.zeros(N_COUNTERS, dtype=np.int64)
    cdef cnp.int64_t[::1] counters = counters_a

    for i in range(n):
        if spins[i] > 0:
            npos += 1

    with nogil:
        for it in range(iters):
            _draw_flips(perm, draws, it, t)
            for a in range(t):
                j = perm[a]
                new[j] = -spins[j]
            e_new = _quad(J, new, n)
            d = e_new - E

            npos_new = npos
            for a in range(t):
                if spins[perm[a]] > 0:
                    npos_new -= 1
                else:
                    npos_new += 1
            if count_ops:
                passes = ((npos_new > 0) + (npos_new < n)) * n_arrays
                counters[0] += passes * m
                counters[1] += n * n_arrays * m
                counters[2] += passes
                counters[3] += n * n_arrays + passes * m
                counters[4] += passes * busiest

            accept = False
            if d <= 0:
                accept = True
                greedy += 1
                nonpos += 1
            else:
                counters[5] += 1
                if tnorm[it] > 0 and r[it] <= exp(-(d / energy_scale) / tnorm[it]):
                    accept = True
            if accept:
                accepts += 1
                for a in range(t):
                    j = perm[a]
                    spins[j] = -spins[j]
                E = e_new
                npos = npos_new
            else:
                for a in range(t):
                    j = perm[a]
                    new[j] = spins[j]
            trace[it] = E
            if E < best:
                best = E
                for i in range(n):
                    best_state[i] = spins[i]

    return trace_a, best_a, best, accepts, greedy, nonpos, counters_a
