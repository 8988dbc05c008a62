"""wavebound: quasistatic polarizability bounds, Y-problems, and acoustic
scattering identities for a penetrable lossy sphere."""

from .mobius_bounds import (
    BoundRegion,
    Contrast,
    ElasticModuliPair,
    MobiusArc,
    RealInterval,
    bm_composite_region,
    bm_region,
    effective_from_y,
    elastic_y_transform,
    hs_interval,
    milton2d_curves,
    milton2d_region,
    polarizability_region,
    polarizability_to_y,
    region_contains,
    region_margin,
)
from .shape_polarizability import (
    InclusionShape,
    ball_polarizability,
    coated_polarizability,
    ellipsoid_polarizability,
    shape_trace_polarizability,
    thin_shell_polarizability,
)
from .quasistatic_grid import (
    PixelInclusion,
    PolarizabilityEstimate,
    disk_inclusion,
    ellipse_inclusion,
    extrapolate_dilute,
    solve_dipole,
    solve_polarizability,
    square_inclusion,
)
from .y_problem import (
    NetworkSpec,
    YProblemInstance,
    YStar,
    discrete_polarizability,
    extract_y_star,
    grid_cell_instance,
    network_to_instance,
    power_identity_residual,
    solve_y,
)
from .acoustic_mie import (
    AcousticMedia,
    BackscatterBound,
    PartialWaveSolution,
    PlaneWave,
    PowerBudget,
    WrapAroundRegion,
    backscatter_bound,
    far_field,
    far_field_mu,
    optical_theorem_residual,
    oscillatory_asymptotic,
    oscillatory_quadrature,
    power_budget,
    scattering_bilinear,
    solve_sphere,
    wrap_around_region,
)

__version__ = "0.1.0"
