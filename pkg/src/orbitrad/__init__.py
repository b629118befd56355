"""orbitrad: orbit radii, orbit-hull membership, and Aluthge transforms
for dense complex matrices, with randomized verification suites."""

__version__ = "0.1.0"

from .aluthge import (
    AluthgeDecomposition,
    AluthgeIteration,
    aluthge,
    iterate_aluthge,
    match_spectra,
)
from .core import (
    Polynomial,
    as_operator,
    as_positive,
    as_unitary,
    derive_seed,
    eig_general,
    eig_hermitian,
    fractional_power,
    frobenius,
    ginibre,
    haar_unitary,
    normalized_trace,
    polar_decompose,
    poly_apply,
    singular_values,
)
from .errors import (
    DegenerateNorm,
    DimensionMismatch,
    NoConvergence,
    NotHermitian,
    NotSkew,
    OrbitradError,
    Singular,
    SizeMismatch,
    WrongDimension,
    ZeroPowerOfSingular,
)
from .hull import (
    DominanceProbe,
    FwBudget,
    HullAtom,
    MembershipOutcome,
    SeparationResult,
    Verdict,
    fw_project,
    hull_combine,
    radius_dominance_probe,
    separation_check,
)
from .optimize import (
    OptimizerConfig,
    RadiusResult,
    directional_derivative,
    grid_oracle_2x2,
    hermitian_oracle,
    lmo_orbit,
    maximize_modulus,
    orbit_objective,
    von_neumann_bound,
)
from .radius import (
    AdmissibilityReason,
    AdmissibilityVerdict,
    NormEvaluator,
    c_numerical_radius,
    c_radius_norm,
    dual_norm_estimate,
    frobenius_norm,
    norm_admissible,
    operator_norm,
    reconstruct_wui_norm,
    register_norm,
    trace_norm_normalized,
)
from .suites import (
    Report,
    WitnessResult,
    commutant_witness,
    report_to_dict,
    reports_to_csv,
    run_suite,
    suite_corollary41,
    suite_prop52,
    suite_prop53,
    suite_theorem51,
)

__all__ = [name for name in dir() if not name.startswith("_")]
