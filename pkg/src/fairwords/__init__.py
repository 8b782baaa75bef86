"""fairwords: minimal-discrepancy letter sequences and their exchange geometry.

Generate words whose letter counts optimally track prescribed frequencies,
build the polygonal partitions whose piecewise translations the words code,
and measure discrepancy, balance, and factor complexity against the known
quantitative bounds.
"""

__version__ = "0.1.0"

from .errors import (
    BoundViolation,
    DegenerateFit,
    DegeneracyWarning,
    EmptyEligibleSet,
    NoConvergence,
    OutOfDomain,
    SaturationWarning,
    UnsupportedDimension,
)
from .sequences import (
    FrequencyVector,
    LetterSequence,
    OrbitTrace,
    SumZeroVector,
    TijdemanParams,
    abelian_complexity,
    balance,
    billiard_generate,
    billiard_step,
    canonical_params,
    d_constant,
    discrepancy_prefix,
    parikh,
    tijdeman_generate,
    tijdeman_step,
)
from .geometry import (
    ConvexPolygon,
    ExchangeSystem,
    HalfPlane,
    PartitionAtom,
    clip,
    exact_partition_d3,
    exchange_step,
    hypercubic_partition_d3,
    hypercubic_region_of,
    iota,
    iota_inverse,
    model_set_vertices,
    project_pi_alpha,
    q_cells,
    subtract,
    tijdeman_region_of,
    verify_natural_partition,
    verify_tiling,
)
from .complexity import (
    ComplexityProfile,
    arrangement_region_bound,
    complexity_profile,
    count_regions_2d,
    exponent_fit,
    factor_complexity,
)
