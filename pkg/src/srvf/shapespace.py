"""Unparametrised curves, represented by their constant speed parametrisation."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curves import SampledCurve, ac_norm, constant_speed
from .metric import DpOptions, dist_param, quotient_distance

__all__ = ["ShapeRecord", "canonical", "is_equivalent", "default_tol", "distance_matrix", "MatrixResult"]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ShapeRecord:
    id: str
    canonical: SampledCurve
    ac_length: float

    @property
    def is_zero(self):
        return self.ac_length == 0.0


def canonical(c, id=""):
    """Constant speed representative of the orbit of ``c``."""
    c_tilde, _ = constant_speed(c)
    return ShapeRecord(id=id, canonical=c_tilde, ac_length=ac_norm(c_tilde))


def default_tol(b, c):
    return 1e-6 * (1.0 + max(ac_norm(b), ac_norm(c)))


def is_equivalent(b, c, tol=None):
    """Whether ``b`` and ``c`` differ only by a reparametrisation, up to ``tol``."""
    if b.dim != c.dim:
        raise ValueError(f"dimension mismatch: {b.dim} != {c.dim}")
    if tol is None:
        tol = default_tol(b, c)
    return dist_param(canonical(b).canonical, canonical(c).canonical) <= tol


@dataclass
class MatrixResult:
    ids: list
    matrix: np.ndarray
    max_asymmetry: float
    zero_shapes: list


def distance_matrix(shapes, opts=None, n_jobs=1, asym_warn=1e-6, progress=None):
    """Symmetric matrix of quotient distances between canonical representatives.

    Each off-diagonal entry averages the two DP directions.  The DP kernel
    releases the GIL, so ``n_jobs > 1`` runs pairs on a thread pool; the
    result does not depend on scheduling.
    """
    opts = opts or DpOptions()
    n = len(shapes)
    dims = {s.canonical.dim for s in shapes}
    if len(dims) > 1:
        raise ValueError(f"mixed dimensions in shape list: {sorted(dims)}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def job(ij):
        i, j = ij
        a, b = shapes[i].canonical, shapes[j].canonical
        d_ab, _ = quotient_distance(a, b, opts)
        d_ba, _ = quotient_distance(b, a, opts)
        return d_ab, d_ba

    if n_jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(job, pairs))
    else:
        results = []
        for k, ij in enumerate(pairs):
            results.append(job(ij))
            if progress:
                progress(k + 1, len(pairs))
    mat = np.zeros((n, n))
    worst = 0.0
    for (i, j), (d_ab, d_ba) in zip(pairs, results):
        asym = abs(d_ab - d_ba)
        worst = max(worst, asym)
        if asym > asym_warn:
            log.warning("asymmetric DP distance for %s/%s: %.3g", shapes[i].id, shapes[j].id, asym)
        mat[i, j] = mat[j, i] = 0.5 * (d_ab + d_ba)
    zero = [s.id for s in shapes if s.is_zero]
    if zero:
        log.warning("zero-length shapes in matrix: %s", ", ".join(zero))
    return MatrixResult(ids=[s.id for s in shapes], matrix=mat, max_asymmetry=worst, zero_shapes=zero)
