"""Oscillating feedback for tracking non-admissible curves.

Library for driftless control-affine systems: sampled-feedback control
synthesis using Lie-bracket directions, reference-curve utilities,
fixed-step simulation under both sampled and classical semantics,
stability metrics, and certified sampling-period bounds.
"""

from .errors import (
    CertificationError,
    DegenerateCurveError,
    DimensionMismatchError,
    DomainError,
    OscTrackError,
    RankConditionError,
    SimulationError,
    UnsupportedSchemeError,
    UsageError,
)
from .systems import (
    NEAR_SINGULAR_COND,
    SINGULARITY_RTOL,
    BracketScheme,
    ControlSystem,
    NestedBracketTerm,
    RankConditionReport,
    VectorField,
    bracket_field,
    build_gain_matrix,
    check_rank_condition,
    finite_difference_jacobian,
    lie_bracket,
)
from .controller import (
    CoefficientVector,
    ControllerParams,
    coefficients,
    control,
    control_degree1,
    control_degree2,
    control_profile,
    make_control_function,
)
from .curves import (
    CURVE_REGISTRY,
    ReferenceCurve,
    constant_curve,
    curve_gamma1,
    curve_gamma2,
    curve_gamma3_admissible,
    curve_gamma4_car,
    curve_gamma4_underwater,
    get_curve,
    velocity_bound,
)
from .expressions import compile_component, curve_from_expression, split_components
from .integrator import (
    MIN_NODES_PER_PERIOD,
    SamplerGrid,
    Trajectory,
    classic_solution_simulate,
    default_substeps,
    simulate,
)
from .metrics import (
    GapReport,
    StabilityReport,
    admissible_vs_nonadmissible_gap,
    dist_to_family,
    entry_time,
    stability_report,
    steady_amplitude,
    tail_error,
    tube_distance,
)
from .scenarios import (
    SCENARIO_REGISTRY,
    Scenario,
    get_scenario,
    rear_wheel_car,
    underwater_vehicle,
    unicycle,
)
from .certify import (
    Certificate,
    CertificateInputs,
    CertificationReport,
    ContractionReport,
    GrowthReport,
    SupBounds,
    VolterraReport,
    VolterraScalingReport,
    bound_constants,
    contraction_check,
    control_magnitude_constants,
    estimate_sup_bounds,
    lemma1_growth_check,
    sigma_value,
    volterra_residual,
    volterra_scaling,
)

__version__ = "0.1.0"
