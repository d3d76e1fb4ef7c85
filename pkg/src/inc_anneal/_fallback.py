"""Pure-Python/numpy annealing loops.

Step-for-step mirror of ``_kernels.pyx``: same draw consumption, same
accept tests, same counter rules. For integer-valued couplings both
backends produce identical traces.
"""

from __future__ import annotations

import math

import numpy as np

N_COUNTERS = 6


def _draw_flips(perm: np.ndarray, row: np.ndarray) -> np.ndarray:
    for a, d in enumerate(row):
        j = a + int(d)
        perm[a], perm[j] = perm[j], perm[a]
    return perm[: row.size]


def _busiest(flips: np.ndarray, k: int, g: int) -> int:
    cols = (flips[:, None] * k + np.arange(k)).ravel()
    return int(np.bincount(cols // g).max())


def insitu_kernel(J, spins, energy0, draws, r, fvals, normalizer, count_ops, k, g, n_arrays):
    n = J.shape[0]
    iters, t = draws.shape
    perm = np.arange(n, dtype=np.int64)
    sf = spins.astype(np.float64)
    trace = np.empty(iters)
    best_state = spins.copy()
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    E, best = float(energy0), math.inf
    accepts = greedy = nonpos = 0
    npos = int((spins > 0).sum())
    for it in range(iters):
        F = _draw_flips(perm, draws[it]).copy()
        sr = sf.copy()
        sr[F] = 0.0
        x = 0.0
        for j in F:
            x += -sf[j] * float(J[j] @ sr)
        e = x / normalizer * fvals[it]

        if count_ops:
            fpos = int((sf[F] > 0).sum())
            rows_pos = npos - fpos
            rows_neg = (n - t) - rows_pos
            R = int(rows_pos > 0) + int(rows_neg > 0)
            C = int(fpos < t) + int(fpos > 0)
            passes = R * C * n_arrays
            counters[0] += passes * t * k
            counters[1] += (n - t) * C * n_arrays * t * k
            counters[2] += passes
            counters[3] += (n - t) * C * n_arrays + passes * t * k
            if passes:
                counters[4] += passes * _busiest(F, k, g)

        accept = False
        if e <= 0:
            accept = True
            greedy += 1
            nonpos += 1
        elif e <= r[it]:
            accept = True
        if accept:
            accepts += 1
            npos -= int((sf[F] > 0).sum()) - int((sf[F] < 0).sum())
            sf[F] = -sf[F]
            E += 4.0 * x
        trace[it] = E
        if E < best:
            best = E
            best_state[:] = sf
    return trace, best_state, best, accepts, greedy, nonpos, counters


def baseline_kernel(J, spins, energy0, draws, r, tnorm, energy_scale, count_ops, k, g, n_arrays):
    n = J.shape[0]
    iters, t = draws.shape
    m = n * k
    busiest = min(g, m)
    perm = np.arange(n, dtype=np.int64)
    sf = spins.astype(np.float64)
    trace = np.empty(iters)
    best_state = spins.copy()
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    E, best = float(energy0), math.inf
    accepts = greedy = nonpos = 0
    for it in range(iters):
        F = _draw_flips(perm, draws[it]).copy()
        new = sf.copy()
        new[F] = -new[F]
        e_new = float(new @ (J @ new))
        d = e_new - E

        if count_ops:
            npos = int((new > 0).sum())
            passes = (int(npos > 0) + int(npos < n)) * n_arrays
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
            if tnorm[it] > 0 and r[it] <= math.exp(-(d / energy_scale) / tnorm[it]):
                accept = True
        if accept:
            accepts += 1
            sf = new
            E = e_new
        trace[it] = E
        if E < best:
            best = E
            best_state[:] = sf
    return trace, best_state, best, accepts, greedy, nonpos, counters
