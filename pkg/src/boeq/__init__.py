"""Benjamin-Ono solutions from spectral resolvent formulas.

The torus flow is evaluated through one Hermitian matrix exponential per
(initial field, time) and a shift-resolvent recurrence for the Fourier
coefficients; the line flow through a frequency-side generator/convolution
system solved in gauge variables on the upper half-plane.  An independent
integrating-factor RK4 pseudo-spectral stepper cross-checks both, and a
validation suite asserts the operator identities the formulas rest on.
"""

__version__ = "0.1.0"

from .errors import (
    BlowUpError,
    BoeqError,
    ConditioningError,
    ConfigurationError,
    DomainError,
    IngestionError,
    InvalidFieldError,
    LinearAlgebraError,
    StabilityWarning,
    TruncationWarning,
)
from .spectral import (
    EigenSystem,
    HalfLineSpectrum,
    HardyTorusVector,
    OperatorMatrix,
    TorusField,
    eigen_system,
    field_from_samples,
    hermitian_evolution,
    project_hardy,
    synthesize_torus,
)
from .torus_operators import (
    LaxPairTorus,
    b_matrix,
    lax_matrix,
    lax_pair,
    shift_adjoint,
    toeplitz_matrix,
)
from .torus_solution import (
    TorusPropagator,
    evaluate_disc,
    evolve_coefficients,
    propagator,
    reconstruct_torus,
    solve_torus,
)
from .timestepper import (
    SolverState,
    Trajectory,
    conserved_quantities,
    evolve,
    evolve_line_on_box,
    step,
)
from .line_operators import (
    LineField,
    LineGrid,
    ResolventEvaluator,
    g_matrix,
    iplus,
    lax_line,
    resolvent_solve,
    toeplitz_line,
)
from .line_solution import (
    LineEvaluation,
    evaluate_uhp,
    evaluate_uhp_detailed,
    reconstruct_line,
    uhp_grid_scan,
)
from .checks import (
    CheckReport,
    check_isospectrality,
    check_lax_evolution,
    check_line_identities,
    check_torus_commutators,
    convergence_study,
    default_suite,
    formula_vs_solver,
    run_study,
)
from .presets import line_preset, parse_preset, torus_preset
