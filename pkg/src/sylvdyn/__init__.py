"""Matrix exponentials by Sylvester's formula, distinct and confluent, and
coherence-vector dynamics of driven two-level and Lambda systems."""

from .dynamics import (
    PulseShape,
    PulseSpec,
    TimeGrid,
    Trajectory,
    adiabatic_solve,
    compare_solvers,
    integrate_g,
    propagate_commuting,
)
from .linalg import EigenPairs, EigenSpectrum, eigenpairs, eigenvalues, inverse, matmul
from .matfunc import (
    ExpmReport,
    confluent_coeffs,
    expm,
    frobenius_covariant,
    frobenius_covariants,
    group_clusters,
    oracle_expm,
    spectral_expm,
    sylvester_expm_confluent,
    sylvester_expm_distinct,
)
from .models import (
    IntegratedCouplings,
    LambdaParams,
    TwoLevelParams,
    build_g_lambda,
    build_g_two_level,
    closed_form_two_level,
    ground_state,
    lambda_eigenvalues,
    pulse_area_conditions,
)

__version__ = "0.1.0"
