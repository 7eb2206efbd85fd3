"""Helicoidal surfaces of constant anisotropic mean curvature by quadratures.

The package builds the surfaces three independent ways and checks them
against each other: a treadmill-sled ODE trace swept by a screw motion
(twizzler), a first-integral quadrature for helicoidal graphs
(helicoid_graph), and a variational bump estimator on the final meshes
(amc_verify) that reuses none of the construction formulas.  pnorm_dual
adds the catenoid/helicoid conjugate pairs of p-norm energies and their
duality check.
"""

from .amc_verify import (
    MeshEnergyReport,
    energy_report,
    grid_mean_curvature_sum,
    lambda_estimate,
    lambda_estimates,
    mesh_energy,
    mesh_volume,
)
from .anisotropy import (
    AnisotropyProfile,
    ConvexityReport,
    WulffMesh,
    convexity_check,
    dirichlet,
    gamma_eval,
    harmonicity_residual,
    inv_mu1,
    inv_mu2,
    isotropic,
    mu1,
    mu2,
    parse_profile,
    polynomial,
    rapini_papoular,
    wulff_mesh,
    wulff_point,
)
from .errors import (
    BranchCutError,
    BranchLost,
    CamcError,
    ConvexityError,
    DegenerateEquation,
    DegenerateFace,
    DegenerateStencil,
    DomainError,
    EmptyDomain,
    HypothesisError,
    NoRealRoot,
    NoRoot,
    SingularTurning,
    WaistError,
)
from .geometry_io import (
    CurveTable,
    read_csv,
    read_obj,
    write_csv,
    write_obj,
    write_svg_polyline,
)
from .helicoid_graph import (
    GraphProfile,
    elgraph_residual,
    first_integral_residual,
    flux_w,
    from_sled,
    graph_mesh,
    helicoid_slit_grid,
    integrate_profile,
    solve_g_r,
)
from .mesh import TriMesh, structured_grid_faces
from .pnorm_dual import (
    ConjugatePair,
    DualPairReport,
    PlanarNorm,
    PNormSpec,
    catenoid_grid,
    catenoid_height,
    catenoid_slope,
    conjugate_grid,
    conjugate_gradient,
    conjugate_height,
    conjugate_helicoid,
    conjugate_period,
    dual_pair_check,
    m_operator_residual,
    norm_graph_residual,
    period_from_flux,
    spow,
    superellipse_area,
)
from .twizzler import (
    HelicoidalMesh,
    SledParams,
    SledTrace,
    cylinder_params,
    discriminant,
    eq_H_residual,
    generating_curve,
    level_set_value,
    seed_state,
    solve_eta2,
    sweep,
    trace_sled,
)

__version__ = "0.1.0"
