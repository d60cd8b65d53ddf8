"""Executable reflection-positivity laboratory on finite time lattices.

The package builds Gaussian path measures on symmetric time grids,
certifies positive-definiteness and reflection positivity of their
generating functionals, reconstructs the physical Hilbert space with its
contraction semigroup and Hamiltonian, verifies multi-time moment
identities three ways, and carries the finite-dimensional Lie-algebra
dual construction with hyperbolic-cone diagnostics.
"""
from .lattice import (
    KERNEL_COSINE,
    KERNEL_CUSTOM,
    KERNEL_FREE_FIELD,
    KERNEL_OU,
    CovarianceError,
    GaussianEuclideanMeasure,
    LatticeMismatchError,
    PathSample,
    TestFunction,
    TimeLattice,
    check_stationarity,
    check_time_reflection_symmetry,
    cosine_damped_covariance,
    covariance_bilinear,
    empirical_covariance,
    free_field_covariance,
    generating_functional,
    measure_from_text,
    measure_to_text,
    ou_covariance,
    sample_path_matrix,
    sample_paths,
    write_measure,
)
from .liealg import (
    ConeCheckReport,
    ConeError,
    ConeSample,
    Involution,
    InvolutionError,
    InvolutionSplit,
    LieAlgebra,
    MembershipReport,
    StructureError,
    adapted_algebra,
    algebra_from_text,
    algebra_to_text,
    builtin_algebra,
    builtin_cone,
    c_dual,
    c_dual_involution,
    change_basis,
    check_hyperbolic_point,
    commutant_dimension,
    hyperbolic_cone_check,
    nilpotent_control_cone,
    semigroup_membership_sample,
    sl2_cone_factorize,
    split_by_involution,
    validate_algebra,
    write_algebra,
)
from .moments import gaussian_monomial_with_source, isserlis_moment
from .positivity import (
    DplusMembershipError,
    HermiticityError,
    PsdCertificate,
    SampledObservable,
    certificate_to_text,
    delta_family,
    exact_sampled_gram_entry,
    find_rp_violation,
    pd_gram_certificate,
    project_dplus,
    reflect,
    rp_gram_certificate,
    rp_sampled_certificate,
    write_certificate,
)
from .reconstruction import (
    HamiltonianResult,
    IntertwiningReport,
    NPointReport,
    ObservableFunctional,
    ReconstructedSpace,
    ReflectionPositivityError,
    RepresentabilityError,
    ShiftRangeError,
    SpectrumError,
    attach_dynamics,
    build_physical_space,
    check_reflection_intertwining,
    constant_functional,
    extract_hamiltonian,
    monomial,
    monomial_basis,
    multiplication_operator,
    reflected_gram,
    space_to_text,
    transfer_operator,
    verify_npoint_identity,
    write_space,
)

__version__ = "0.1.0"

__all__ = [
    "CovarianceError",
    "GaussianEuclideanMeasure",
    "KERNEL_COSINE",
    "KERNEL_CUSTOM",
    "KERNEL_FREE_FIELD",
    "KERNEL_OU",
    "LatticeMismatchError",
    "PathSample",
    "TestFunction",
    "TimeLattice",
    "check_stationarity",
    "check_time_reflection_symmetry",
    "cosine_damped_covariance",
    "covariance_bilinear",
    "empirical_covariance",
    "free_field_covariance",
    "generating_functional",
    "measure_from_text",
    "measure_to_text",
    "ou_covariance",
    "sample_path_matrix",
    "sample_paths",
    "write_measure",
    "gaussian_monomial_with_source",
    "isserlis_moment",
    "DplusMembershipError",
    "HermiticityError",
    "PsdCertificate",
    "SampledObservable",
    "certificate_to_text",
    "delta_family",
    "exact_sampled_gram_entry",
    "find_rp_violation",
    "pd_gram_certificate",
    "project_dplus",
    "reflect",
    "rp_gram_certificate",
    "rp_sampled_certificate",
    "write_certificate",
    "HamiltonianResult",
    "IntertwiningReport",
    "NPointReport",
    "ObservableFunctional",
    "ReconstructedSpace",
    "ReflectionPositivityError",
    "RepresentabilityError",
    "ShiftRangeError",
    "SpectrumError",
    "attach_dynamics",
    "build_physical_space",
    "check_reflection_intertwining",
    "constant_functional",
    "extract_hamiltonian",
    "monomial",
    "monomial_basis",
    "multiplication_operator",
    "reflected_gram",
    "space_to_text",
    "transfer_operator",
    "verify_npoint_identity",
    "write_space",
    "ConeCheckReport",
    "ConeError",
    "ConeSample",
    "Involution",
    "InvolutionError",
    "InvolutionSplit",
    "LieAlgebra",
    "MembershipReport",
    "StructureError",
    "adapted_algebra",
    "algebra_from_text",
    "algebra_to_text",
    "builtin_algebra",
    "builtin_cone",
    "c_dual",
    "c_dual_involution",
    "change_basis",
    "check_hyperbolic_point",
    "commutant_dimension",
    "hyperbolic_cone_check",
    "nilpotent_control_cone",
    "semigroup_membership_sample",
    "sl2_cone_factorize",
    "split_by_involution",
    "validate_algebra",
    "write_algebra",
    "__version__",
]
