"""Compiled kernels for the lattice path search."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def edge_score(x0, x1, y0, y1, cp, cq, pk, pv, qk, qv):
    """Exact value of the matching integral along the segment (x0, y0) -> (x1, y1).

    The integrand is constant between consecutive crossings of SRVF cell
    boundaries, so the integral is a finite sum.  ``cp`` and ``cq`` are the
    cells of ``p`` and ``q`` containing ``x0`` and ``y0``.
    """
    dx = x1 - x0
    dy = y1 - y0
    if dx <= 0.0 or dy <= 0.0:
        return 0.0
    n_p = pv.shape[0]
    n_q = qv.shape[0]
    d = pv.shape[1]
    u = 0.0
    total = 0.0
    while u < 1.0:
        if cp + 1 < n_p and pk[cp + 1] < x1:
            up = (pk[cp + 1] - x0) / dx
        else:
            up = 1.0
        if cq + 1 < n_q and qk[cq + 1] < y1:
            uq = (qk[cq + 1] - y0) / dy
        else:
            uq = 1.0
        un = min(up, uq)
        dot = 0.0
        for k in range(d):
            dot += pv[cp, k] * qv[cq, k]
        total += dot * (un - u)
        if up == un and up < 1.0:
            cp += 1
        if uq == un and uq < 1.0:
            cq += 1
        u = un
    return total * np.sqrt(dx * dy)


@njit(cache=True, nogil=True)
def fill_table(xs, ys, cpx, cqy, pk, pv, qk, qv, moves):
    m = xs.shape[0] - 1
    n = ys.shape[0] - 1
    value = np.full((m + 1, n + 1), -np.inf)
    back = np.full((m + 1, n + 1), -1, dtype=np.int8)
    value[0, 0] = 0.0
    evaluated = 0
    for i in range(m + 1):
        for j in range(n + 1):
            if i == 0 and j == 0:
                continue
            best = -np.inf
            arg = -1
            for r in range(moves.shape[0]):
                a = moves[r, 0]
                b = moves[r, 1]
                if a > i or b > j:
                    continue
                prev = value[i - a, j - b]
                if prev == -np.inf:
                    continue
                s = edge_score(xs[i - a], xs[i], ys[j - b], ys[j],
                               cpx[i - a], cqy[j - b], pk, pv, qk, qv)
                evaluated += 1
                if prev + s > best:
                    best = prev + s
                    arg = r
            value[i, j] = best
            back[i, j] = arg
    return value, back, evaluated
