"""toric_quant: desk-scale numerics for toric Kahler quantization.

Delzant polytope combinatorics, symplectic potential families, Legendre
coordinate changes, degenerating polarization frames, monomial section
norms, and polytope quadrature for concentration experiments.
"""

from .polytope import (
    DelzantPolytope,
    DelzantCertificate,
    EmptySliceError,
    PolytopeError,
    Slice,
    Vertex,
    enumerate_vertices,
    face_slice,
    facet_value,
    is_delzant,
    lattice_points,
    slice_chart,
    weight_multiplicities,
)
from .subtorus import (
    AdaptedBasis,
    ConvexFunction,
    ProjectionError,
    SubtorusProjection,
    adapted_basis,
    default_convex,
    pullback,
    quadratic,
    strict_convexity_check,
)
from .potential import (
    DomainBoundaryError,
    SymplecticPotential,
    g0_gradient,
    g0_hessian,
    g0_value,
    hessian_determinant_product,
    validate_potential,
)
from .legendre import (
    LegendrePair,
    NewtonConvergenceError,
    flow_identity_residual,
    forward,
    inverse,
    kahler_potential,
)
from .polarization import (
    ComplexStructureMatrix,
    PolarizationFrame,
    complex_structure,
    decay_report,
    grassmann_distance,
    kahler_metric,
    limit_frame,
    polarization_frame,
)
from .sections import (
    ConcentrationWeight,
    MonomialSection,
    closed_form_norm_g0,
    concentration_weight,
    l1_norm,
    monomial_basis,
    norm_factorization_check,
    pairwise_orthogonality,
    pointwise_norm,
)
from .quadrature import (
    ConcentrationResult,
    QuadratureError,
    QuadratureRule,
    box_rule,
    concentration_experiment,
    delta_pairing,
    grid_rule,
    integrate,
    integrate_slice,
    make_rule,
    slice_rule,
)

__version__ = "0.1.0"
