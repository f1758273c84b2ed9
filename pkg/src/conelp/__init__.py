"""conelp: linear programming by a single conical projection.

A bounded LP ``min c x  s.t.  A x <= b`` is solved by projecting a
distinguished point onto the cone generated by augmented constraint
rows; the package bundles the cone-projection engine, the least-norm
front end, the LP driver, a reference simplex solver, seeded instance
generators, and a benchmarking CLI.
"""

from conelp.cone import (
    ConeProjectionResult,
    GeneratorSet,
    NumericalBreakdown,
    ProjectionOptions,
    SizeLimitExceeded,
    brute_force_projection,
    project_onto_cone,
    refine_active_set,
)
from conelp.least_norm import (
    DegenerateHomogenization,
    LeastNormResult,
    least_norm_point,
)
from conelp.lp import (
    CertificateReport,
    DegenerateRecovery,
    LpProblem,
    LpSolution,
    ThetaPolicy,
    prepare_conic,
    recover_solution,
    solve,
    support_estimate,
    verify_certificate,
)
from conelp.simplex import OracleSolution, PivotLimitExceeded, solve_simplex
from conelp.instances import (
    InstanceSpec,
    densify,
    gen_box,
    generate,
    random_unitary,
)

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "ConeProjectionResult",
    "DegenerateHomogenization",
    "DegenerateRecovery",
    "GeneratorSet",
    "InstanceSpec",
    "LeastNormResult",
    "LpProblem",
    "LpSolution",
    "NumericalBreakdown",
    "OracleSolution",
    "PivotLimitExceeded",
    "ProjectionOptions",
    "SizeLimitExceeded",
    "ThetaPolicy",
    "brute_force_projection",
    "densify",
    "gen_box",
    "generate",
    "least_norm_point",
    "prepare_conic",
    "project_onto_cone",
    "random_unitary",
    "recover_solution",
    "refine_active_set",
    "solve",
    "solve_simplex",
    "support_estimate",
    "verify_certificate",
]
