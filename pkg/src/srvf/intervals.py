"""Finite unions of closed intervals in [0, 1] with rational endpoints."""

from __future__ import annotations

from fractions import Fraction

__all__ = ["IntervalSet"]


def _frac(x):
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class IntervalSet:
    """Sorted, pairwise disjoint closed intervals ``[lo, hi]`` inside ``[0, 1]``.

    Overlapping or touching intervals are merged on construction and empty
    (``lo == hi``) intervals are dropped, so two sets with the same Lebesgue
    measure structure compare equal.  All arithmetic is exact.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals=()):
        ivs = []
        for lo, hi in intervals:
            lo, hi = _frac(lo), _frac(hi)
            if not (0 <= lo <= hi <= 1):
                raise ValueError(f"interval [{lo}, {hi}] is not inside [0, 1]")
            if hi > lo:
                ivs.append((lo, hi))
        ivs.sort()
        merged = []
        for lo, hi in ivs:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        self.intervals = tuple(merged)

    @classmethod
    def full(cls):
        return cls([(0, 1)])

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        body = ", ".join(f"[{lo}, {hi}]" for lo, hi in self.intervals)
        return f"IntervalSet({body})"

    @property
    def measure(self):
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def endpoints(self):
        return sorted({x for iv in self.intervals for x in iv})

    def complement(self):
        """Closure of ``[0, 1]`` minus the set (boundary points have measure zero)."""
        out, cur = [], Fraction(0)
        for lo, hi in self.intervals:
            if lo > cur:
                out.append((cur, lo))
            cur = hi
        if cur < 1:
            out.append((cur, Fraction(1)))
        return IntervalSet(out)

    def union(self, other):
        return IntervalSet(self.intervals + other.intervals)

    def intersection(self, other):
        out, i, j = [], 0, 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if hi > lo:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def difference(self, other):
        return self.intersection(other.complement())

    def fatten(self, delta):
        """Grow every interval by ``delta`` on both sides, clipped to ``[0, 1]``.

        Raises if two intervals would merge.
        """
        delta = _frac(delta)
        if delta < 0:
            raise ValueError("delta must be non-negative")
        grown = [(max(Fraction(0), lo - delta), min(Fraction(1), hi + delta)) for lo, hi in self.intervals]
        for (_, h0), (l1, _) in zip(grown, grown[1:]):
            if l1 <= h0:
                raise ValueError(f"delta={delta} merges neighbouring intervals")
        return IntervalSet(grown)

    def contains(self, x):
        x = _frac(x)
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def to_json(self):
        return [[str(lo), str(hi)] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, data):
        return cls((Fraction(lo), Fraction(hi)) for lo, hi in data)
