"""Square root velocity framework for open curves.

Transforms, elastic distances, quotient distances over reparametrisations
computed by lattice dynamic programming, and an exact construction of a
curve pair for which no optimal reparametrisation exists.
"""

from .curves import (
    Partition,
    Reparametrisation,
    SampledCurve,
    Srvf,
    ac_norm,
    compose,
    constant_speed,
    l2_distance,
    l2_norm,
    probe_nondifferentiability,
    resample,
    srvf_action,
    srvt,
    srvt_inverse,
    v_map,
)
from .intervals import IntervalSet
from .metric import (
    AlignmentResult,
    DpOptions,
    dist_param,
    dp_align,
    geodesic,
    matching_functional,
    quotient_distance,
    remodel_pair,
)
from .shapespace import ShapeRecord, canonical, distance_matrix, is_equivalent

__version__ = "0.1.0"

__all__ = [
    "Partition", "Reparametrisation", "SampledCurve", "Srvf", "ac_norm", "compose", "constant_speed",
    "l2_distance", "l2_norm", "probe_nondifferentiability", "resample", "srvf_action", "srvt",
    "srvt_inverse", "v_map", "IntervalSet", "AlignmentResult", "DpOptions", "dist_param", "dp_align",
    "geodesic", "matching_functional", "quotient_distance", "remodel_pair", "ShapeRecord", "canonical",
    "distance_matrix", "is_equivalent",
]
