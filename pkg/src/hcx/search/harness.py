"""Random conjugated quaternion triples on su(2)^4 and their Nijenhuis residuals."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..acstruct import standard_quaternions
from ..liealg import LieAlgebra, su2_power
from . import kernels
from .kernels import Structure

AXIOM_TOL = 1e-9
CONDITION_CAP = 1e3
ALARM_THRESHOLD = 1e-6
DEFAULT_STEPS = 500


def base_triple(dim: int = 12) -> np.ndarray:
    if dim % 4:
        raise ValueError("quaternionic dimension must be a multiple of 4")
    quats = standard_quaternions(dim // 4)
    return np.array([[[float(x) for x in row] for row in q.matrix.to_rows()] for q in quats])


def condition_ratio(P: np.ndarray) -> float:
    """||P||_F ||P^-1||_F, an upper bound for the 2-norm condition number."""
    try:
        Pinv = np.linalg.inv(P)
    except np.linalg.LinAlgError:
        return math.inf
    return float(np.linalg.norm(P) * np.linalg.norm(Pinv))


@dataclass(frozen=True)
class CandidateTriple:
    P: np.ndarray
    I: np.ndarray
    J: np.ndarray
    K: np.ndarray
    seed: str

    @classmethod
    def from_conjugator(cls, P: np.ndarray, seed: str = "", Q: np.ndarray | None = None) -> "CandidateTriple":
        P = np.asarray(P, dtype=float)
        Q = base_triple(P.shape[0]) if Q is None else Q
        Pinv = np.linalg.inv(P)
        I, J, K = (P @ q @ Pinv for q in Q)
        return cls(P, I, J, K, seed)

    @property
    def structures(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.I, self.J, self.K

    def axiom_defects(self) -> dict[str, float]:
        I, J, K = self.structures
        eye = np.eye(I.shape[0])
        mats = {
            "I^2+id": I @ I + eye,
            "J^2+id": J @ J + eye,
            "K^2+id": K @ K + eye,
            "IJ-K": I @ J - K,
            "IJ+JI": I @ J + J @ I,
            "IK+KI": I @ K + K @ I,
            "JK+KJ": J @ K + K @ J,
        }
        return {k: float(np.max(np.abs(v))) for k, v in mats.items()}

    def satisfies_axioms(self, tol: float = AXIOM_TOL) -> bool:
        return max(self.axiom_defects().values()) < tol


def sample_conjugator(rng: np.random.Generator, dim: int = 12, cap: float = CONDITION_CAP) -> np.ndarray:
    while True:
        P = rng.standard_normal((dim, dim))
        if condition_ratio(P) <= cap:
            return P


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_candidate(seed: int, index: int, dim: int = 12, cap: float = CONDITION_CAP) -> CandidateTriple:
    P = sample_conjugator(trial_rng(seed, index), dim, cap)
    return CandidateTriple.from_conjugator(P, f"{seed}:{index}")


def structure_residual(g: LieAlgebra, M: np.ndarray, backend: str | None = None) -> float:
    """Sum over basis pairs a<b of |N_M(e_a, e_b)|^2."""
    return kernels.structure_residual(M, Structure.from_algebra(g), backend)


def residual(g: LieAlgebra, t: CandidateTriple, backend: str | None = None) -> float:
    if t.I.shape != (g.dim, g.dim):
        raise ValueError(f"triple is {t.I.shape[0]}-dimensional, algebra has dimension {g.dim}")
    st = Structure.from_algebra(g)
    return sum(kernels.structure_residual(M, st, backend) for M in t.structures)


def _decade(r: float) -> int:
    return math.floor(math.log10(r)) if r > 0 else -324


@dataclass
class SearchReport:
    trials: int
    best_residual: float
    best_seed: str
    histogram: list = field(default_factory=list)  # [[lo, hi, count], ...] by decade
    optimize: bool = False
    steps: int = 0

    @classmethod
    def from_residuals(cls, residuals, seeds, optimize: bool = False, steps: int = 0) -> "SearchReport":
        residuals = [float(r) for r in residuals]
        if not residuals:
            raise ValueError("a report needs at least one trial")
        best = min(range(len(residuals)), key=lambda i: (residuals[i], i))
        counts: dict[int, int] = {}
        for r in residuals:
            counts[_decade(r)] = counts.get(_decade(r), 0) + 1
        hist = [[10.0 ** d, 10.0 ** (d + 1), counts[d]] for d in sorted(counts)]
        return cls(len(residuals), residuals[best], seeds[best], hist, optimize, steps)

    def merge(self, other: "SearchReport") -> "SearchReport":
        counts: dict[tuple, int] = {}
        for lo, hi, c in self.histogram + other.histogram:
            counts[(lo, hi)] = counts.get((lo, hi), 0) + c
        mine = (self.best_residual, self.best_seed)
        theirs = (other.best_residual, other.best_seed)
        best = min(mine, theirs)
        return SearchReport(self.trials + other.trials, best[0], best[1],
                            [[lo, hi, c] for (lo, hi), c in sorted(counts.items())],
                            self.optimize, self.steps)

    @property
    def alarm(self) -> bool:
        return not self.best_residual > ALARM_THRESHOLD

    def to_dict(self) -> dict:
        return {"trials": self.trials, "best_residual": self.best_residual, "best_seed": self.best_seed,
                "histogram": self.histogram, "optimize": self.optimize, "steps": self.steps}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SearchReport":
        d = json.loads(text)
        return cls(d["trials"], d["best_residual"], d["best_seed"], d["histogram"],
                   d.get("optimize", False), d.get("steps", 0))


def run_search(trials: int, seed: int = 0, optimize: bool = False, steps: int = DEFAULT_STEPS,
               cap: float = CONDITION_CAP, backend: str | None = None, chunk: int = 4096,
               g: LieAlgebra | None = None) -> SearchReport:
    """Sample `trials` condition-capped conjugators, optionally descend on each.

    Trial i draws from its own stream spawned from `seed`, so the report does
    not depend on chunking or thread count.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    g = g if g is not None else su2_power(4)
    st = Structure.from_algebra(g)
    Q = base_triple(g.dim)
    report = None
    for lo in range(0, trials, chunk):
        idx = range(lo, min(trials, lo + chunk))
        Ps = np.stack([sample_conjugator(trial_rng(seed, i), g.dim, cap) for i in idx])
        if optimize:
            _, f = kernels.descend(Ps, Q, st, steps, cap=cap, backend=backend)
        else:
            f = kernels.triple_residuals(Ps, Q, st, cap, backend)
        part = SearchReport.from_residuals(f, [f"{seed}:{i}" for i in idx], optimize, steps if optimize else 0)
        report = part if report is None else report.merge(part)
    return report
