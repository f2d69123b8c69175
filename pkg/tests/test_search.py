import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcx import liealg
from hcx.acstruct import conjugated_triple, doubled, example_structures, nijenhuis, swap_structure
from hcx.scalarpoly import Matrix
from hcx.search import (
    ALARM_THRESHOLD,
    AXIOM_TOL,
    CONDITION_CAP,
    HAVE_NUMBA,
    CandidateTriple,
    SearchReport,
    base_triple,
    condition_ratio,
    residual,
    run_search,
    sample_candidate,
    structure_residual,
)
from hcx.search import kernels
from hcx.search.kernels import Structure

G4 = liealg.su2_power(4)
BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


def as_float(M: Matrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in M.to_rows()])


def exact_residual(g, A) -> Fraction:
    """Sum of |N(e_a, e_b)|^2 over a < b, straight from the exact Nijenhuis tensor."""
    basis = [tuple(Fraction(int(i == k)) for k in range(g.dim)) for i in range(g.dim)]
    total = Fraction(0)
    for a, b in itertools.combinations(range(g.dim), 2):
        total += sum(c * c for c in nijenhuis(g, A, basis[a], basis[b]))
    return total


def factor_permutation(perm) -> np.ndarray:
    """Matrix of the automorphism sending factor i to factor perm[i]."""
    n = 3 * len(perm)
    S = np.zeros((n, n))
    for i, p in enumerate(perm):
        for r in range(3):
            S[3 * p + r, 3 * i + r] = 1
    return S


@pytest.mark.parametrize("backend", BACKENDS)
class TestResidual:
    def test_doubled_fixtures_vanish(self, backend):
        for A in example_structures():
            assert structure_residual(G4, as_float(doubled(A).matrix), backend) < 1e-24

    def test_swap_matches_exact(self, backend):
        S = swap_structure()
        g = liealg.su2_power(2)
        got = structure_residual(g, as_float(S.matrix), backend)
        assert got == pytest.approx(float(exact_residual(g, S)), rel=1e-12)

    def test_conjugated_triple_matches_exact(self, backend):
        P = Matrix.from_rows([[1 if i == j or j == i + 1 else 0 for j in range(12)] for i in range(12)])
        exact = conjugated_triple(P, G4)
        want = sum(float(exact_residual(G4, A)) for A in exact)
        t = CandidateTriple.from_conjugator(as_float(P))
        assert residual(G4, t, backend) == pytest.approx(want, rel=1e-10)

    def test_identity_conjugator(self, backend):
        # the standard triple itself is not integrable on su(2)^4
        t = CandidateTriple.from_conjugator(np.eye(12))
        assert t.satisfies_axioms()
        assert residual(G4, t, backend) == pytest.approx(48.0)

    def test_abelian_standard_triple(self, backend):
        t = CandidateTriple.from_conjugator(np.eye(8))
        assert residual(liealg.abelian(8), t, backend) == 0

    def test_dimension_mismatch(self, backend):
        with pytest.raises(ValueError):
            residual(G4, CandidateTriple.from_conjugator(np.eye(8)), backend)


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1), st.permutations(range(4)), st.lists(st.booleans(), min_size=4, max_size=4))
def test_residual_is_automorphism_invariant(seed, perm, flips):
    # factor permutations and the sign flip e1, e2 -> -e1, -e2 are automorphisms
    t = sample_candidate(seed, 0)
    S = factor_permutation(perm)
    D = np.diag([(-1.0 if f and r < 2 else 1.0) for f in flips for r in range(3)])
    A = D @ S
    moved = CandidateTriple.from_conjugator(A @ t.P)
    assert residual(G4, moved) == pytest.approx(residual(G4, t), rel=1e-9)


class TestSampling:
    def test_candidates_satisfy_axioms(self):
        for i in range(200):
            t = sample_candidate(3, i)
            assert t.satisfies_axioms(AXIOM_TOL), t.axiom_defects()
            assert condition_ratio(t.P) <= CONDITION_CAP

    def test_broken_axioms_detected(self):
        t = CandidateTriple.from_conjugator(np.eye(12))
        bad = CandidateTriple(t.P, t.I, t.J, -t.K, "x")
        assert not bad.satisfies_axioms()
        assert bad.axiom_defects()["IJ-K"] == pytest.approx(2.0)

    def test_base_triple(self):
        Q = base_triple(12)
        assert Q.shape == (3, 12, 12)
        with pytest.raises(ValueError):
            base_triple(10)

    def test_singular_condition(self):
        assert condition_ratio(np.zeros((4, 4))) == float("inf")

    def test_trial_streams_are_independent_of_order(self):
        a = sample_candidate(11, 5).P
        sample_candidate(11, 4)
        assert np.array_equal(a, sample_candidate(11, 5).P)
        assert not np.array_equal(a, sample_candidate(11, 6).P)


class TestReport:
    def test_deterministic(self):
        assert run_search(300, seed=7).to_json() == run_search(300, seed=7).to_json()

    def test_chunking_does_not_matter(self):
        assert run_search(300, seed=7, chunk=64).to_dict() == run_search(300, seed=7).to_dict()

    def test_best_is_reproducible_from_seed(self):
        rep = run_search(200, seed=9)
        seed, idx = map(int, rep.best_seed.split(":"))
        assert residual(G4, sample_candidate(seed, idx)) == pytest.approx(rep.best_residual, rel=1e-9)

    def test_histogram_counts(self):
        rep = run_search(250, seed=1)
        assert sum(c for _, _, c in rep.histogram) == 250
        for lo, hi, _ in rep.histogram:
            assert hi == pytest.approx(10 * lo)
        lo = min(h[0] for h in rep.histogram)
        assert lo <= rep.best_residual < 10 * lo

    def test_json_round_trip(self):
        rep = run_search(50, seed=2)
        assert SearchReport.from_json(rep.to_json()) == rep

    def test_merge_associative(self):
        a = SearchReport.from_residuals([3.0, 40.0], ["0:0", "0:1"])
        b = SearchReport.from_residuals([0.5], ["0:2"])
        c = SearchReport.from_residuals([700.0, 0.5], ["0:3", "0:4"])
        assert a.merge(b).merge(c) == a.merge(b.merge(c))
        assert a.merge(b).merge(c) == SearchReport.from_residuals([3.0, 40.0, 0.5, 700.0, 0.5],
                                                                  ["0:0", "0:1", "0:2", "0:3", "0:4"])

    def test_alarm(self):
        assert SearchReport.from_residuals([ALARM_THRESHOLD / 2], ["0:0"]).alarm
        assert SearchReport.from_residuals([float("nan")], ["0:0"]).alarm
        assert not SearchReport.from_residuals([1.0], ["0:0"]).alarm

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            run_search(0)
        with pytest.raises(ValueError):
            SearchReport.from_residuals([], [])


class TestDescent:
    def test_descent_never_increases(self):
        rep0 = run_search(8, seed=4)
        rep1 = run_search(8, seed=4, optimize=True, steps=20)
        assert rep1.best_residual <= rep0.best_residual
        assert rep1.optimize and rep1.steps == 20

    def test_descent_respects_cap(self):
        st = Structure.from_algebra(G4)
        Ps = np.stack([sample_candidate(5, i).P for i in range(3)])
        P, f = kernels.descend(Ps, base_triple(12), st, 10, cap=CONDITION_CAP)
        assert all(condition_ratio(p) <= CONDITION_CAP for p in P)
        assert np.all(f > ALARM_THRESHOLD)

    def test_finds_integrable_abelian_triple(self):
        # on an abelian algebra everything is integrable, so descent stays at 0
        g = liealg.abelian(8)
        rep = run_search(4, seed=0, optimize=True, steps=5, g=g)
        assert rep.best_residual == 0


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
class TestBackendAgreement:
    def test_triple_residuals(self):
        st = Structure.from_algebra(G4)
        Ps = np.stack([sample_candidate(8, i).P for i in range(64)])
        a = kernels.triple_residuals(Ps, base_triple(12), st, backend="numpy")
        b = kernels.triple_residuals(Ps, base_triple(12), st, backend="numba")
        np.testing.assert_allclose(a, b, rtol=1e-10)

    def test_descent(self):
        st = Structure.from_algebra(G4)
        Ps = np.stack([sample_candidate(8, i).P for i in range(2)])
        Pa, fa = kernels.descend(Ps, base_triple(12), st, 5, backend="numpy")
        Pb, fb = kernels.descend(Ps, base_triple(12), st, 5, backend="numba")
        np.testing.assert_allclose(fa, fb, rtol=1e-8)
        np.testing.assert_allclose(Pa, Pb, rtol=1e-8, atol=1e-12)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            structure_residual(G4, np.eye(12), backend="cuda")
