"""kinterp: the real K-method of interpolation at desk scale.

Exact and numeric Peetre K-functionals for concrete quasi-Banach couples,
K-method parameter norms, constructive K-divisibility decompositions, and
operator witnesses / monotonicity probes on finite instances.
"""

from .concave import ConcavePL, least_concave_majorant, upper_concave_envelope
from .convexity import (
    ConvexityEstimate,
    convexify_couple,
    convexify_element,
    convexify_leg,
    l_convexity_probe,
    odot,
    oplus,
    pq_convexity_probe,
    signed_power,
)
from .couples import (
    CoupleDescriptor,
    SpaceLeg,
    couple_from_json,
    couple_to_json,
    element_from_json,
    element_to_json,
    quasi_norm,
)
from .divisibility import (
    DivisibilityCertificate,
    FundamentalSplit,
    HypothesisViolation,
    fundamental_split,
    k_divide,
    p_k_divide,
    riesz_decompose,
)
from .elements import (
    StepFunction,
    WeightedSeq,
    decreasing_rearrangement,
    sequence_as_step,
)
from .grid import DyadicGrid, default_grid
from .kfunctional import (
    ConvElement,
    KCurve,
    SplitWitness,
    conv_to_element,
    delta_sigma_norms,
    k_curve,
    k_curve_l1_linf,
    k_curve_linfty_couple,
    k_curve_numeric,
    k_curve_weighted_l1,
    k_exact_l1_linf,
    k_exact_linfty_couple,
    k_exact_weighted_l1,
    k_functional,
    k_numeric,
)
from .kmethod import (
    EHatCover,
    EHatNorm,
    ParameterLattice,
    e_hat_upper,
    k_space_norm,
    lions_peetre_norm,
    orbit_norm,
    parameter_norm,
)
from .cmlab import (
    MonotonicityEstimate,
    OperatorWitness,
    cm_witness_l1_linf,
    k_dominates,
    kpq_probe,
    kpq_ratio,
    non_cm_demo,
)

__version__ = "0.1.0"
