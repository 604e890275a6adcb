"""Shared generators for the test suite."""

import numpy as np

from srvf.curves import Reparametrisation, SampledCurve


def random_curve(rng, n=None, dim=None, flat_cells=0):
    n = n or int(rng.integers(4, 64))
    dim = dim or int(rng.integers(1, 4))
    steps = rng.normal(size=(n, dim))
    if flat_cells:
        steps[rng.choice(n, size=min(flat_cells, n - 1), replace=False)] = 0.0
    return SampledCurve(np.vstack([np.zeros((1, dim)), np.cumsum(steps, axis=0)]))


def random_reparam(rng, n=None, strict=True):
    n = n or int(rng.integers(3, 40))
    w = rng.exponential(size=n)
    if not strict:
        w[rng.choice(n, size=max(1, n // 4), replace=False)] = 0.0
        if w.sum() == 0:
            w[0] = 1.0
    cum = np.concatenate([[0.0], np.cumsum(w)])
    vals = cum / cum[-1]
    knots = np.concatenate([[0.0], np.sort(rng.uniform(0.02, 0.98, size=n - 1)), [1.0]])
    if np.any(np.diff(knots) <= 0):
        knots = np.linspace(0.0, 1.0, n + 1)
    return Reparametrisation(vals, knots)


def grid_compatible_reparam(n, seed=0):
    """Strict map sending uniform knots to uniform knots with slopes 1/2, 1 and 2."""
    assert n % 8 == 0
    q = n // 8
    # (t, gamma) corners on the n-grid: slope 2, then 1/2, then 1
    pts = [(0, 0), (q, 2 * q), (3 * q, 3 * q), (8 * q, 8 * q)]
    t = np.array([a for a, _ in pts], dtype=float) / n
    g = np.array([b for _, b in pts], dtype=float) / n
    return Reparametrisation(g, t)


def smooth_curve(n, dim=2, seed=0):
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=(4, dim))

    def f(t):
        t = t[:, None]
        return coef[0] * t + coef[1] * np.sin(3 * t) + coef[2] * t**2 + 0.3 * coef[3] * np.cos(5 * t)

    return SampledCurve.from_function(f, n)
