"""Numerical laboratory for a scale-critical family of fourth-order curve
diffusion flows on closed planar curves: closed stationary profiles, the
spectral stability calculus for multiply covered circles, and time
integration with full shape diagnostics.
"""

from .elliptic import (
    closure_integral,
    complete_K,
    incomplete_F,
    jacobi_am,
    jacobi_cn_sn_dn,
)
from .geometry import (
    ClosedCurve,
    CurveMetrics,
    FourierModes,
    circle,
    ellipse,
    fourier_of_curvature,
    metrics,
    read_curve_csv,
    resample_by_arclength,
    tangent_normal_curvature,
    translation_mode_energy,
    write_curve_csv,
)
from .stationary import (
    SuperLemniscateSpec,
    build_super_lemniscate,
    closure_residual,
    homothetic_identity_check,
    solve_curvature_ode,
    stationarity_residual,
)
from .stability import (
    StabilityReport,
    lambda_hat,
    p_c,
    stability_region_grid,
    stability_report,
    stable_omegas,
    symbol_roots,
    thresholds,
)
from .flow import (
    FlowConfig,
    FlowState,
    TimeSeries,
    e_evolution_check,
    run,
    sigma_asymptotics,
    step,
    velocity_field,
)
from .perturbation import (
    Q_functional,
    R_functional,
    SupportPerturbation,
    build_support_curve,
    e_prime0_prediction,
    run_instability_experiment,
)

__version__ = "0.1.0"
