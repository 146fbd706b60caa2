"""Mode-by-mode solver and verification lab for the truncated fractional extension."""

from .core import (
    DecayRate,
    FracParams,
    IntegrabilityError,
    SingularSystemError,
    alpha_from_beta,
    compute_dbeta,
    compute_mu,
)
from .quadrature import Mesh, PiecewiseFunction, QuadratureRule, gauss_jacobi_rule, geometric_mesh, weighted_norm_sq
from .bessel import bessel_ik, dtn_symbol, mode_profile, mode_profile_derivative, solution_norms, truncation_error
from .modes import MeshControls, ModeProblem, ModeSolution, mode_dtn, mode_energy_error, solve_mode
from .synthesis import (
    AliasingWarning,
    FieldNorms,
    RadialProfile,
    bump_profile,
    gaussian_profile,
    grid_synthesize,
    radial_functional,
    xreg_norm_sq,
)
from .lab import (
    CauchyStudy,
    ExperimentRecord,
    InequalityReport,
    RateFit,
    RegularityProbe,
    TruncationStudy,
    cauchy_study,
    inequality_suite,
    rate_fit,
    regularity_probe,
    stability_scan,
    truncation_study,
)
from .report import write_report

__version__ = "0.1.0"
