"""Compiled inner loops.

The letter recurrences are inherently serial (each step depends on the
previous letter counts), so the long-horizon generators live here as numba
kernels.  The deviation vector is recomputed from the integer letter counts
at every step, x_n = x_0 + n*alpha - counts, so floating-point error stays
at the scale of one product n*alpha_i instead of accumulating additively.
"""

import numpy as np
from numba import njit, prange

#: relative tolerance for travel-time ties and admissibility comparisons
TIE_EPS = 1e-12
#: absolute tolerance on domain membership checks
DOMAIN_EPS = 1e-9

STATUS_OK = -1


@njit(cache=True)
def orbit_kernel(alpha, big_c, big_cp, x0, n_steps, billiard,
                 letters, running_max, points, store_points):
    """Iterate the greedy travel-time recurrence for ``n_steps`` letters.

    ``billiard`` switches between the plain argmin of (1 - x_i)/alpha_i on
    the projected cube (with a per-step domain check) and the admissibility-
    filtered rule with travel times (C - x_i)/alpha_i.

    Returns (status, lo, hi) where status is STATUS_OK or the failing step
    index, and lo/hi hold per-coordinate orbit extremes.
    """
    d = alpha.size
    counts = np.zeros(d, np.int64)
    x = np.empty(d)
    lo = np.full(d, np.inf)
    hi = np.full(d, -np.inf)
    run = 0.0
    for n in range(n_steps + 1):
        dev = 0.0
        for i in range(d):
            xi = x0[i] + n * alpha[i] - counts[i]
            x[i] = xi
            if store_points:
                points[n, i] = xi
            a = abs(xi - x0[i])
            if a > dev:
                dev = a
            if xi < lo[i]:
                lo[i] = xi
            if xi > hi[i]:
                hi[i] = xi
        if dev > run:
            run = dev
        running_max[n] = run
        if n == n_steps:
            break

        tmin = np.inf
        if billiard:
            smax = -np.inf
            for i in range(d):
                t = (1.0 - x[i]) / alpha[i]
                if t < tmin:
                    tmin = t
                s = -x[i] / alpha[i]
                if s > smax:
                    smax = s
            if smax > tmin + DOMAIN_EPS or tmin < -DOMAIN_EPS:
                return n, lo, hi
        else:
            for i in range(d):
                if x[i] + alpha[i] - 1.0 >= -big_cp - TIE_EPS:
                    t = (big_c - x[i]) / alpha[i]
                    if t < tmin:
                        tmin = t
            if tmin == np.inf:
                return n, lo, hi

        tol = TIE_EPS * max(1.0, abs(tmin))
        letter = -1
        for i in range(d):
            if billiard:
                t = (1.0 - x[i]) / alpha[i]
            else:
                if x[i] + alpha[i] - 1.0 < -big_cp - TIE_EPS:
                    continue
                t = (big_c - x[i]) / alpha[i]
            if t <= tmin + tol:
                letter = i
                break
        counts[letter] += 1
        letters[n] = letter + 1
    return STATUS_OK, lo, hi


@njit(cache=True, parallel=True)
def window_spreads(prefix, m_max):
    """Per window length m = 1..m_max, spread of letter counts over all windows.

    ``prefix`` is the cumulative count of one letter (length L+1); the count
    inside the window [k, k+m) is prefix[k+m] - prefix[k].
    """
    length = prefix.size - 1
    spreads = np.zeros(m_max + 1, np.int64)
    for m in prange(1, m_max + 1):
        mx = prefix[m] - prefix[0]
        mn = mx
        for k in range(1, length - m + 1):
            v = prefix[k + m] - prefix[k]
            if v > mx:
                mx = v
            elif v < mn:
                mn = v
        spreads[m] = mx - mn
    return spreads
