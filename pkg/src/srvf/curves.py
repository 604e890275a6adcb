"""Discrete curves, square root velocity functions and reparametrisations.

Curves are piecewise linear on a partition of ``[0, 1]``, SRVFs are piecewise
constant on the cells of a partition and reparametrisations are weakly
increasing piecewise linear maps of ``[0, 1]`` onto itself.  With these
choices the transform, its inverse, the norm identity and the right action of
reparametrisations are exact up to floating point roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Partition",
    "SampledCurve",
    "Srvf",
    "Reparametrisation",
    "v_map",
    "srvt",
    "srvt_inverse",
    "ac_norm",
    "l2_norm",
    "l2_inner",
    "l2_distance",
    "compose",
    "srvf_action",
    "constant_speed",
    "resample",
    "refine",
    "max_curve_difference",
    "probe_nondifferentiability",
]

MONOTONE_TOL = 1e-12


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _check_knots(knots):
    knots = np.asarray(knots, dtype=float)
    if knots.ndim != 1 or len(knots) < 2:
        raise ValueError("a partition needs at least two breakpoints")
    if not np.all(np.isfinite(knots)):
        raise ValueError("partition breakpoints must be finite")
    if knots[0] != 0.0 or knots[-1] != 1.0:
        raise ValueError("partition must start at 0 and end at 1")
    if np.any(np.diff(knots) <= 0):
        raise ValueError("partition breakpoints must be strictly increasing")
    return knots


def uniform_knots(n):
    if n < 1:
        raise ValueError("need at least one cell")
    knots = np.arange(n + 1, dtype=float) / n
    return knots


def _merge_knots(*knot_arrays):
    return np.unique(np.concatenate(knot_arrays))


@dataclass(frozen=True)
class Partition:
    """Strictly increasing breakpoints ``0 = t_0 < ... < t_n = 1``."""

    breakpoints: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", _frozen(_check_knots(self.breakpoints)))

    @classmethod
    def uniform(cls, n):
        return cls(uniform_knots(n))

    @property
    def n_cells(self):
        return len(self.breakpoints) - 1

    @property
    def widths(self):
        return np.diff(self.breakpoints)

    def refine(self, other):
        """Common refinement with another partition."""
        return Partition(_merge_knots(self.breakpoints, other.breakpoints))

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(
            self.breakpoints, other.breakpoints
        )

    def __hash__(self):
        return hash(self.breakpoints.tobytes())


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Piecewise linear curve through ``samples`` at parameters ``knots``.

    ``samples`` has shape ``(n_cells + 1, dim)`` and its first row is the
    origin.  ``knots`` defaults to the uniform grid.  ``velocity`` optionally
    holds the exact cell derivatives when they are known (for instance after
    integrating an SRVF); differencing the samples would lose digits through
    cancellation, which the square root then amplifies near zero speed.
    """

    samples: np.ndarray
    knots: np.ndarray = None
    velocity: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[0] < 2 or samples.shape[1] < 1:
            raise ValueError("samples must have shape (n_cells + 1, dim) with n_cells >= 1")
        if not np.all(np.isfinite(samples)):
            raise ValueError("curve samples must be finite")
        if np.any(samples[0] != 0.0):
            raise ValueError("curve must start at the origin (use SampledCurve.anchored)")
        knots = uniform_knots(samples.shape[0] - 1) if self.knots is None else _check_knots(self.knots)
        if len(knots) != samples.shape[0]:
            raise ValueError(f"{len(knots)} knots for {samples.shape[0]} samples")
        object.__setattr__(self, "samples", _frozen(samples))
        object.__setattr__(self, "knots", _frozen(knots))
        if self.velocity is not None:
            vel = np.asarray(self.velocity, dtype=float)
            if vel.shape != (samples.shape[0] - 1, samples.shape[1]) or not np.all(np.isfinite(vel)):
                raise ValueError("velocity must be finite with shape (n_cells, dim)")
            drift = np.abs(np.diff(samples, axis=0) - vel * np.diff(knots)[:, None])
            if np.any(drift > 1e-9 * (1.0 + np.abs(samples).max())):
                raise ValueError("velocity does not match the samples")
            object.__setattr__(self, "velocity", _frozen(vel))

    @classmethod
    def anchored(cls, points, knots=None):
        """Translate ``points`` so the curve starts at the origin."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        return cls(points - points[0], knots)

    @classmethod
    def from_function(cls, f, n):
        """Sample ``f`` (mapping an array of parameters to points) on the uniform grid."""
        t = uniform_knots(n)
        return cls.anchored(f(t), t)

    @property
    def dim(self):
        return self.samples.shape[1]

    @property
    def n_cells(self):
        return self.samples.shape[0] - 1

    @property
    def partition(self):
        return Partition(self.knots)

    def velocities(self):
        if self.velocity is not None:
            return self.velocity
        return np.diff(self.samples, axis=0) / np.diff(self.knots)[:, None]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.interp(t, self.knots, self.samples[:, i]) for i in range(self.dim)], axis=-1)

    def __add__(self, other):
        a, b = refine(self, other.knots), refine(other, self.knots)
        return SampledCurve(a.samples + b.samples, a.knots)

    def scaled(self, s):
        return SampledCurve(s * self.samples, self.knots)

    def __repr__(self):
        return f"SampledCurve(dim={self.dim}, n_cells={self.n_cells})"


@dataclass(frozen=True, eq=False)
class Srvf:
    """Piecewise constant function, ``values[k]`` on ``[knots[k], knots[k+1])``."""

    values: np.ndarray
    knots: np.ndarray = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("values must have shape (n_cells, dim)")
        if not np.all(np.isfinite(values)):
            raise ValueError("SRVF values must be finite")
        knots = uniform_knots(values.shape[0]) if self.knots is None else _check_knots(self.knots)
        if len(knots) != values.shape[0] + 1:
            raise ValueError(f"{len(knots)} knots for {values.shape[0]} cells")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "knots", _frozen(knots))

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def n_cells(self):
        return self.values.shape[0]

    @property
    def partition(self):
        return Partition(self.knots)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, self.n_cells - 1)
        return self.values[idx]

    def __add__(self, other):
        a, b = refine(self, other.knots), refine(other, self.knots)
        return Srvf(a.values + b.values, a.knots)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, s):
        return Srvf(s * self.values, self.knots)

    def __repr__(self):
        return f"Srvf(dim={self.dim}, n_cells={self.n_cells})"


@dataclass(frozen=True, eq=False)
class Reparametrisation:
    """Weakly increasing piecewise linear map with ``gamma(0) = 0``, ``gamma(1) = 1``.

    Knot values that decrease by at most ``1e-12`` are clamped, larger
    violations raise ``ValueError``.
    """

    values: np.ndarray
    knots: np.ndarray = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        knots = uniform_knots(len(values) - 1) if self.knots is None else _check_knots(self.knots)
        if len(knots) != len(values):
            raise ValueError(f"{len(knots)} knots for {len(values)} values")
        if not np.all(np.isfinite(values)):
            raise ValueError("reparametrisation values must be finite")
        if abs(values[0]) > MONOTONE_TOL or abs(values[-1] - 1.0) > MONOTONE_TOL:
            raise ValueError("reparametrisation must map 0 to 0 and 1 to 1")
        if np.any(np.diff(values) < -MONOTONE_TOL):
            i = int(np.argmax(np.diff(values) < -MONOTONE_TOL))
            raise ValueError(f"reparametrisation decreases on cell {i}")
        values = np.clip(np.maximum.accumulate(values), 0.0, 1.0)
        values[0], values[-1] = 0.0, 1.0
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "knots", _frozen(knots))

    @classmethod
    def identity(cls, n=1):
        return cls(uniform_knots(n), uniform_knots(n))

    @classmethod
    def from_function(cls, f, n):
        t = uniform_knots(n)
        return cls(f(t), t)

    @property
    def n_cells(self):
        return len(self.knots) - 1

    @property
    def slopes(self):
        return np.diff(self.values) / np.diff(self.knots)

    @property
    def strict(self):
        return bool(np.all(np.diff(self.values) > 0))

    def __call__(self, t):
        return np.interp(t, self.knots, self.values)

    def as_curve(self):
        return SampledCurve(self.values[:, None], self.knots)

    def inverse(self):
        if not self.strict:
            raise ValueError("only strictly increasing reparametrisations are invertible")
        return Reparametrisation(self.knots, self.values)

    def compose(self, inner):
        """The map ``t -> self(inner(t))``."""
        knots, values = _compose_pl(self.knots, self.values[:, None], inner)
        return Reparametrisation(values[:, 0], knots)

    def ac_distance(self, other):
        """``|| self - other ||_AC`` computed on the common refinement."""
        a = refine(self.as_curve(), other.knots)
        b = refine(other.as_curve(), self.knots)
        return float(np.abs(np.diff(a.samples[:, 0] - b.samples[:, 0])).sum())

    def __repr__(self):
        return f"Reparametrisation(n_cells={self.n_cells}, strict={self.strict})"


def v_map(x):
    """``x / sqrt(|x|)`` with ``0 -> 0``; acts on the last axis."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("v_map needs finite input")
    # scale first so squaring tiny components does not underflow
    m = np.max(np.abs(x), axis=-1, keepdims=True)
    ms = np.where(m > 0, m, 1.0)
    n = ms * np.linalg.norm(x / ms, axis=-1, keepdims=True)
    safe = np.where(n > 0, n, 1.0)
    return np.where(n > 0, x / np.sqrt(safe), 0.0)


def srvt(c):
    """Square root velocity transform of a piecewise linear curve."""
    return Srvf(v_map(c.velocities()), c.knots)


def srvt_inverse(q):
    """Curve ``t -> int_0^t q |q|``, exact for piecewise constant ``q``."""
    vel = q.values * np.linalg.norm(q.values, axis=1, keepdims=True)
    samples = np.vstack([np.zeros((1, q.dim)), np.cumsum(vel * np.diff(q.knots)[:, None], axis=0)])
    return SampledCurve(samples, q.knots, vel)


def ac_norm(c):
    """Length ``sum |c_{k+1} - c_k|`` (``c(0)`` is the origin)."""
    return float(np.linalg.norm(np.diff(c.samples, axis=0), axis=1).sum())


def _common(p, q):
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} != {q.dim}")
    if np.array_equal(p.knots, q.knots):
        return p, q
    return refine(p, q.knots), refine(q, p.knots)


def l2_inner(p, q):
    p, q = _common(p, q)
    return float(np.sum(np.einsum("ij,ij->i", p.values, q.values) * np.diff(p.knots)))


def l2_norm(q):
    return float(np.sqrt(np.sum(q.values**2 * np.diff(q.knots)[:, None])))


def l2_distance(p, q):
    """L2 distance of two SRVFs, on their common refinement if partitions differ."""
    p, q = _common(p, q)
    diff = p.values - q.values
    return float(np.sqrt(np.sum(diff**2 * np.diff(p.knots)[:, None])))


def refine(x, knots):
    """Re-express ``x`` on the union of its knots and ``knots`` without changing it."""
    new = _merge_knots(x.knots, np.asarray(knots, dtype=float))
    if len(new) == len(x.knots):
        return x
    if isinstance(x, Srvf):
        return Srvf(x(0.5 * (new[1:] + new[:-1])), new)
    if isinstance(x, Reparametrisation):
        return Reparametrisation(x(new), new)
    return SampledCurve(x(new), new)


def _compose_pl(outer_knots, outer_values, gamma):
    """Knots and values of ``outer o gamma`` for a piecewise linear ``outer``.

    Adds a knot wherever ``gamma`` crosses an outer breakpoint strictly inside
    one of its cells, so that the result is exactly piecewise linear.
    """
    s, g = gamma.knots, gamma.values
    new_s, new_g = [s], [g]
    inner = outer_knots[1:-1]
    lo, hi = np.minimum(g[:-1], g[1:]), np.maximum(g[:-1], g[1:])
    for i in np.nonzero(hi > lo)[0]:
        a = np.searchsorted(inner, lo[i], side="right")
        b = np.searchsorted(inner, hi[i], side="left")
        if b > a:
            tj = inner[a:b]
            sj = s[i] + (tj - g[i]) / (g[i + 1] - g[i]) * (s[i + 1] - s[i])
            keep = (sj > s[i]) & (sj < s[i + 1])
            new_s.append(sj[keep])
            new_g.append(tj[keep])
    s_all = np.concatenate(new_s)
    g_all = np.concatenate(new_g)
    order = np.argsort(s_all, kind="stable")
    s_all, g_all = s_all[order], g_all[order]
    keep = np.concatenate([[True], np.diff(s_all) > 0])
    s_all, g_all = s_all[keep], g_all[keep]
    vals = np.stack(
        [np.interp(g_all, outer_knots, outer_values[:, i]) for i in range(outer_values.shape[1])],
        axis=-1,
    )
    return s_all, vals


def compose(c, gamma):
    """Exact composition ``c o gamma`` on the refined partition."""
    knots, samples = _compose_pl(c.knots, c.samples, gamma)
    samples[0] = 0.0
    return SampledCurve(samples, knots)


def srvf_action(q, gamma):
    """``(q o gamma) sqrt(gamma')`` on the partition used by ``compose``."""
    knots, gvals = _compose_pl(q.knots, q.knots[:, None], gamma)
    g = gvals[:, 0]
    slopes = np.diff(g) / np.diff(knots)
    mid = 0.5 * (g[1:] + g[:-1])
    vals = q(mid) * np.sqrt(np.maximum(slopes, 0.0))[:, None]
    return Srvf(vals, knots)


def constant_speed(c):
    """Split ``c`` into a constant speed curve and a reparametrisation.

    Returns ``(c_tilde, gamma)`` with ``c = c_tilde o gamma``.  ``c_tilde``
    lives on the normalised arc length of the original knots, with repeated
    values (zero length cells) dropped, so its speed equals the length of
    ``c`` on every cell.  The zero curve gives itself and the identity.
    """
    seg = np.linalg.norm(np.diff(c.samples, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] == 0.0:
        return c, Reparametrisation(c.knots, c.knots)
    # dividing by the last entry keeps trailing flat cells exactly at 1
    s = cum / cum[-1]
    gamma = Reparametrisation(s, c.knots)
    keep = np.concatenate([[True], np.diff(s) > 0])
    knots = s[keep]
    samples = c.samples[keep]
    return SampledCurve(samples, knots), gamma


def resample(x, n):
    """Values on the uniform ``n`` cell grid.

    Curves are linearly interpolated; an SRVF is resampled through its curve
    so that the norm identity still holds.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = uniform_knots(n)
    if isinstance(x, Srvf):
        return srvt(resample(srvt_inverse(x), n))
    if isinstance(x, Reparametrisation):
        return Reparametrisation(x(t), t)
    samples = x(t)
    samples[0] = 0.0
    return SampledCurve(samples, t)


def max_curve_difference(a, b):
    """Sup norm of ``a - b`` for piecewise linear curves (attained at knots)."""
    t = _merge_knots(a.knots, b.knots)
    return float(np.max(np.abs(a(t) - b(t))))


def probe_nondifferentiability(c, h, eps_list):
    """Difference quotients ``||(R(c + eps h) - R(c)) / eps||`` for each ``eps``.

    ``h`` may only move on cells where ``c`` is stationary; there the quotient
    behaves like ``eps ** -0.5``, so it blows up as ``eps -> 0``.
    """
    c, h = refine(c, h.knots), refine(h, c.knots)
    dc = np.diff(c.samples, axis=0)
    dh = np.diff(h.samples, axis=0)
    moving = np.any(dc != 0, axis=1) & np.any(dh != 0, axis=1)
    if np.any(moving):
        raise ValueError(f"h' must vanish where c' != 0 (violated on cell {int(np.argmax(moving))})")
    rc = srvt(c)
    out = []
    for eps in eps_list:
        if eps <= 0:
            raise ValueError("eps must be positive")
        # perturb the derivative directly: adding eps * h to the samples would
        # cancel digits on the stationary cells
        shifted = SampledCurve(c.samples + eps * h.samples, c.knots, c.velocities() + eps * h.velocities())
        out.append(l2_distance(srvt(shifted), rc) / eps)
    return out
