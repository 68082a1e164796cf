"""Radial graphs in space forms: curvature, pinching measures and inverse mean curvature flow."""

from .ambient import EUCLIDEAN, HYPERBOLIC, SPHERECAP, AmbientSpace, get_ambient
from .conformal import (
    ConformalFrame,
    ball_to_graph,
    convert_report,
    graph_to_ball,
    hausdorff_transfer,
    pull_curvature_to_hyperbolic,
)
from .curvature import (
    CurvatureBundle,
    GeometryError,
    aubry_ricci_deficit,
    curvature_from_embedding,
    curvature_from_graph,
    lambda1_estimate,
    ricci_from_gauss,
)
from .experiments import (
    DecayReport,
    PinchRecord,
    PinchReport,
    SweepConfig,
    optimality_run,
    pinch_sweep,
    report_emit,
)
from .graph import (
    RadialGraph,
    make_graph_from_function,
    make_perturbed_graph,
    make_sphere_graph,
    read_graph,
    write_graph,
)
from .grid import SphericalGrid, build_grid, parse_grid
from .imcf import (
    FlowBreakdown,
    FlowControls,
    FlowDiagnostics,
    FlowState,
    fit_decay_exponents,
    flow_step,
    run_flow,
    sphere_flow_oracle,
)
from .measures import (
    SphereFit,
    andrews_deviation,
    best_fit_sphere,
    best_umbilic_lambda,
    gradient_bound_check,
    hausdorff_to_sphere,
    oscillation_about,
    rescale_to_unit_area,
    steiner_point,
    tensor_lp_norm,
    tensor_sup_norm,
)

__version__ = "0.1.0"
