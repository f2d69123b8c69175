from .certificate import (
    CONTRADICTION_KINDS,
    STEP_KINDS,
    Certificate,
    CertificateError,
    Fact,
    ReplayError,
    ReplayResult,
    replay,
)
from .oracle import OracleResult, lemma_minimum
from .proofs import (
    CASES,
    case_certificate,
    derive_equalities,
    derive_identities,
    infeasibility_certificate,
    theorem_certificate,
)
from .structures import (
    BlockDecomposition,
    DecompositionError,
    InvariantSubspace,
    ObstructionReport,
    SevenConditions,
    block_decompose,
    check_seven_conditions,
    evaluate_system,
    hypercomplex_obstruction,
    same_invariant_subspace,
    subspace_dims,
    unique_invariant_subspace,
)
from .system import (
    Comparison,
    ConstraintSystem,
    compare_with_reference,
    reference_equations,
    reference_lemma_polynomials,
    symbolic_system,
)

__all__ = [
    "BlockDecomposition", "CASES", "CONTRADICTION_KINDS", "Certificate", "CertificateError", "Comparison",
    "ConstraintSystem", "DecompositionError", "Fact", "InvariantSubspace", "ObstructionReport", "OracleResult",
    "ReplayError", "ReplayResult", "STEP_KINDS", "SevenConditions", "block_decompose", "case_certificate",
    "check_seven_conditions", "compare_with_reference", "derive_equalities", "derive_identities",
    "evaluate_system", "hypercomplex_obstruction", "infeasibility_certificate", "lemma_minimum", "reference_equations",
    "reference_lemma_polynomials", "replay", "same_invariant_subspace", "subspace_dims", "symbolic_system",
    "theorem_certificate", "unique_invariant_subspace",
]
