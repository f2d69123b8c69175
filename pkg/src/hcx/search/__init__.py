from .harness import (
    ALARM_THRESHOLD,
    AXIOM_TOL,
    CONDITION_CAP,
    CandidateTriple,
    SearchReport,
    base_triple,
    condition_ratio,
    residual,
    run_search,
    sample_candidate,
    structure_residual,
)
from .kernels import BACKEND, HAVE_NUMBA

__all__ = [
    "ALARM_THRESHOLD", "AXIOM_TOL", "BACKEND", "CONDITION_CAP", "CandidateTriple", "HAVE_NUMBA",
    "SearchReport", "base_triple", "condition_ratio", "residual", "run_search", "sample_candidate",
    "structure_residual",
]
