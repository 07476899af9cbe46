"""Densities of corner projections of unitary orbital measures.

The radial part of the K x K corner of a Haar-random Hermitian matrix with
fixed spectrum X has a density given by a K x K determinant of fundamental
splines. This package evaluates that density and everything it is built
from, and checks it against Monte Carlo and exact lattice-point counts.
"""

from gtcorners.errors import (
    ConditioningError,
    DegenerateSpectrumError,
    DimensionError,
    RangeError,
    ResourceError,
    VerificationError,
)
from gtcorners.geometry import (
    GTPattern,
    as_spectrum,
    interlaces,
    min_gap,
    pattern_in_polytope,
    vandermonde,
)
from gtcorners.splines import (
    PiecewisePolynomial,
    b_spline,
    divided_difference,
    fundamental_spline,
    spline_tail_integrals,
    to_piecewise,
    truncated_power,
)
from gtcorners.density import (
    CornerDensity,
    c_constant,
    compose_kernel,
    corner_density,
    gt_volume,
    hciz,
    kernel_density,
    normalization,
)

__version__ = "0.1.0"

__all__ = [
    "ConditioningError",
    "CornerDensity",
    "DegenerateSpectrumError",
    "DimensionError",
    "GTPattern",
    "PiecewisePolynomial",
    "RangeError",
    "ResourceError",
    "VerificationError",
    "as_spectrum",
    "b_spline",
    "c_constant",
    "compose_kernel",
    "corner_density",
    "divided_difference",
    "fundamental_spline",
    "gt_volume",
    "hciz",
    "interlaces",
    "kernel_density",
    "min_gap",
    "normalization",
    "pattern_in_polytope",
    "spline_tail_integrals",
    "to_piecewise",
    "truncated_power",
    "vandermonde",
]
