"""A pair of Lipschitz plane curves without optimal reparametrisations.

Both SRVFs agree with the unit vector ``v1(t) = (cos eps t, sin eps t)`` off a
fat Cantor set ``B`` of measure 1/2 and take the constant values
``v2 = (-1/2, sqrt(3)/2)`` resp. ``v3 = (-1/2, -sqrt(3)/2)`` on ``B``.  All
mixed inner products are negative, which caps the matching functional at
``lambda(A) = 1/2`` without ever reaching it.  Here ``B`` is replaced by its
level ``k`` approximation ``B_k``, a finite union of intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import Reparametrisation, Srvf, l2_distance, l2_norm, srvt_inverse, uniform_knots
from .intervals import IntervalSet
from .metric import DpOptions, dp_align, matching_functional

__all__ = [
    "MAX_CANTOR_LEVEL",
    "V2",
    "V3",
    "CounterexampleConfig",
    "fat_cantor",
    "cantor_measure",
    "build_pq",
    "default_delta",
    "approx_reparams",
    "finest_resolvable_level",
    "verify_upper_bound",
    "counterexample_report",
]

# endpoints of B_k have denominator 2**(2k+1); beyond this they stop being floats
MAX_CANTOR_LEVEL = 24

V2 = np.array([-0.5, math.sqrt(3.0) / 2.0])
V3 = np.array([-0.5, -math.sqrt(3.0) / 2.0])
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class CounterexampleConfig:
    cantor_level: int = 10
    epsilon: Fraction = Fraction(1, 10)
    grid_n: int = 2048
    fatten_delta: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.fatten_delta is not None:
            object.__setattr__(self, "fatten_delta", Fraction(self.fatten_delta))
        if self.cantor_level < 1:
            raise ValueError("cantor_level must be >= 1")
        if not 0 < self.epsilon < Fraction(1, 6):
            raise ValueError(f"epsilon must satisfy 0 < epsilon < 1/6, got {float(self.epsilon)}")
        if self.grid_n < 1:
            raise ValueError("grid_n must be >= 1")
        if self.fatten_delta is not None and self.fatten_delta <= 0:
            raise ValueError("fatten_delta must be positive")


def fat_cantor(k, max_level=MAX_CANTOR_LEVEL):
    """Level ``k`` of the Smith-Volterra-Cantor construction.

    Step ``j`` removes the open middle interval of length ``4**-j`` from
    each of the ``2**(j-1)`` remaining intervals.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > max_level:
        raise ValueError(f"level {k} exceeds the cap {max_level}")
    ivs = [(Fraction(0), Fraction(1))]
    for j in range(1, k + 1):
        gap = Fraction(1, 4**j)
        nxt = []
        for lo, hi in ivs:
            mid = (lo + hi) / 2
            nxt += [(lo, mid - gap / 2), (mid + gap / 2, hi)]
        ivs = nxt
    return IntervalSet(ivs)


def cantor_measure(k):
    """Closed form ``(1 + 2**-k) / 2`` of ``measure(fat_cantor(k))``."""
    return HALF * (1 + Fraction(1, 2**k))


def v1(t, epsilon):
    t = np.asarray(t, dtype=float)
    return np.stack([np.cos(epsilon * t), np.sin(epsilon * t)], axis=-1)


def build_pq(cfg):
    """SRVFs ``p``, ``q`` and the sets ``A``, ``B`` for the given level.

    The partition is the uniform ``grid_n`` grid joined with the endpoints of
    ``B_k``, so each cell lies in ``A`` or in ``B``; ``v1`` is taken at cell
    midpoints.
    """
    B = fat_cantor(cfg.cantor_level)
    A = B.complement()
    knots = np.unique(np.concatenate([uniform_knots(cfg.grid_n), [float(x) for x in B.endpoints()]]))
    mid = 0.5 * (knots[1:] + knots[:-1])
    in_b = np.zeros(len(mid), dtype=bool)
    lo = np.array([float(a) for a, _ in B])
    hi = np.array([float(b) for _, b in B])
    idx = np.searchsorted(lo, mid, side="right") - 1
    ok = idx >= 0
    in_b[ok] = mid[ok] < hi[idx[ok]]
    base = v1(mid, float(cfg.epsilon))
    p = np.where(in_b[:, None], V2, base)
    q = np.where(in_b[:, None], V3, base)
    eps = float(cfg.epsilon)
    worst = max(
        float(np.dot(V2, V3)),
        float(np.max(base @ V2)),
        float(np.max(base @ V3)),
    )
    if not worst < 0:
        raise ValueError(f"mixed inner products must be negative for eps={eps}")
    return Srvf(p, knots), Srvf(q, knots), A, B


def default_delta(k_prime):
    return Fraction(1, 4 ** (k_prime + 2))


def _explicit_sets(cfg, k_prime):
    if not 1 <= k_prime <= cfg.cantor_level:
        raise ValueError(f"k' must lie in [1, {cfg.cantor_level}]")
    delta = cfg.fatten_delta if cfg.fatten_delta is not None else default_delta(k_prime)
    return fat_cantor(k_prime).fatten(delta)


def approx_reparams(cfg, k_prime):
    """Explicit pair from the approximating sequence at level ``k_prime``.

    ``O`` is ``B_{k'}`` fattened by ``delta``.  Off ``O`` both maps are the
    identity; on each component of ``O`` ``beta`` moves at speed 2 on the left
    half while ``gamma`` is frozen, then the other way round.  Returns
    ``(beta, gamma, predicted_value)`` with ``predicted_value = lambda(O^c)``.
    """
    O = _explicit_sets(cfg, k_prime)
    knots, bv, gv = [Fraction(0)], [Fraction(0)], [Fraction(0)]
    for lo, hi in O:
        mid = (lo + hi) / 2
        for t, b, g in ((lo, lo, lo), (mid, hi, lo), (hi, hi, hi)):
            if t > knots[-1]:
                knots.append(t)
                bv.append(b)
                gv.append(g)
    if knots[-1] < 1:
        knots.append(Fraction(1))
        bv.append(Fraction(1))
        gv.append(Fraction(1))
    t = np.array([float(x) for x in knots])
    beta = Reparametrisation([float(x) for x in bv], t)
    gamma = Reparametrisation([float(x) for x in gv], t)
    return beta, gamma, 1 - O.measure


def _knots_of_pair(cfg, k_prime):
    O = _explicit_sets(cfg, k_prime)
    pts = set()
    for lo, hi in O:
        pts.update((lo, hi, (lo + hi) / 2))
    return pts


def finest_resolvable_level(cfg, n):
    """Largest ``k'`` whose explicit pair is a path on the uniform ``n`` lattice (0 if none)."""
    best = 0
    for k_prime in range(1, cfg.cantor_level + 1):
        if all((x * n).denominator == 1 for x in _knots_of_pair(cfg, k_prime)):
            best = k_prime
    return best


@dataclass
class UpperBoundReport:
    values: list
    bound: float
    max_value: float
    gap: float
    all_below: bool

    def to_json(self):
        return {
            "values": self.values,
            "bound": self.bound,
            "max_value": self.max_value,
            "gap": self.gap,
            "all_below": self.all_below,
        }


def verify_upper_bound(p, q, trials, bound=0.5, slack=1e-9):
    """Evaluate the matching functional on every ``(beta, gamma)`` in ``trials``."""
    values = [matching_functional(p, q, b, g) for b, g in trials]
    top = max(values) if values else -math.inf
    return UpperBoundReport(
        values=values,
        bound=bound,
        max_value=top,
        gap=bound - top,
        all_below=all(v <= bound + slack for v in values),
    )


def counterexample_report(cfg, n_list=(1, 128, 512, 2048), k_prime_list=None, opts=None):
    """Numbers showing the supremum 1/2 approached but not reached.

    ``dp`` holds one row per lattice size ``N``: the DP matching value, the
    explicit pair at the finest level resolved by that lattice, and the
    quotient distance squared (which tends to 1).  ``explicit`` holds the
    approximating sequence over ``k_prime_list``.
    """
    opts = opts or DpOptions(move_set_radius=4, include_axis_moves=True)
    if k_prime_list is None:
        k_prime_list = list(range(1, min(cfg.cantor_level, 8) + 1))
    p, q, A, B = build_pq(cfg)
    norm2 = l2_norm(p) ** 2 + l2_norm(q) ** 2
    explicit = []
    for k_prime in k_prime_list:
        beta, gamma, predicted = approx_reparams(cfg, k_prime)
        value = matching_functional(p, q, beta, gamma)
        explicit.append({
            "k_prime": k_prime,
            "predicted_value": str(predicted),
            "explicit_value": value,
            "gap_to_half": 0.5 - value,
            "gap_bound": float(Fraction(1, 2**k_prime) + (1 - predicted) - cantor_measure(k_prime)),
        })
    rows = []
    trials = []
    for n in n_list:
        res = dp_align(p, q, DpOptions(opts.move_set_radius, opts.include_axis_moves, grid_n=n))
        k_res = finest_resolvable_level(cfg, n)
        ex_value = None
        if k_res:
            beta, gamma, _ = approx_reparams(cfg, k_res)
            ex_value = matching_functional(p, q, beta, gamma)
            trials.append((beta, gamma))
        trials.append((res.beta, res.gamma))
        rows.append({
            "N": n,
            "k_prime": k_res,
            "dp_value": res.matching_value,
            "explicit_value": ex_value,
            "gap_to_half": 0.5 - res.matching_value,
            "qdist_sq": res.quotient_distance**2,
            "gap_to_one": res.quotient_distance**2 - 1.0,
        })
    ident = Reparametrisation.identity()
    trials.append((ident, ident))
    bound = verify_upper_bound(p, q, trials)
    return {
        "config": {
            "cantor_level": cfg.cantor_level,
            "epsilon": str(cfg.epsilon),
            "grid_n": cfg.grid_n,
            "fatten_delta": None if cfg.fatten_delta is None else str(cfg.fatten_delta),
            "move_set_radius": opts.move_set_radius,
            "include_axis_moves": opts.include_axis_moves,
        },
        "measure_B": str(B.measure),
        "measure_A": str(A.measure),
        "norm_p_sq": l2_norm(p) ** 2,
        "norm_q_sq": l2_norm(q) ** 2,
        "norm_sum": norm2,
        # |v1(t) - v1(midpoint)| <= eps * |t - midpoint| on every cell
        "v1_midpoint_error_bound": float(cfg.epsilon) * float(np.max(np.diff(p.knots))) / 2,
        "dist_param_sq": l2_distance(p, q) ** 2,
        "dist_param_sq_exact": str(3 * B.measure),
        "explicit": explicit,
        "dp": rows,
        "upper_bound": bound.to_json(),
    }


def curves(cfg):
    """Lipschitz curves ``b``, ``c`` whose SRVFs are ``p`` and ``q``."""
    p, q, _, _ = build_pq(cfg)
    return srvt_inverse(p), srvt_inverse(q)
