import random
from fractions import Fraction

import pytest
from conftest import PROPERTY_CASES, cross, frac_rank, invertible_matrices, rationals, vectors
from hypothesis import given, settings
from hypothesis import strategies as st

from hcx import liealg
from hcx.acstruct import (
    BilinearForm,
    Endomorphism,
    StructureError,
    conjugated_triple,
    doubled,
    example_structures,
    invariant_inner_product,
    is_hypercomplex,
    is_integrable,
    nijenhuis,
    quaternionic_decomposition,
    standard_quaternions,
    swap_structure,
)
from hcx.scalarpoly import Matrix

G2 = liealg.su2_power(2)


def e(i, j, m=2):
    return G2.e(i, j) if m == 2 else liealg.su2_power(m).e(i, j)


def _bracket_by_hand(x, y):
    """Bracket on su(2)+su(2) as two cross products."""
    return cross(x[:3], y[:3]) + cross(x[3:], y[3:])


def _nijenhuis_by_hand(M: Matrix, x, y):
    J = M.apply
    br = _bracket_by_hand
    inner = tuple(a + b for a, b in zip(br(J(x), y), br(x, J(y))))
    return tuple(a + b - c for a, b, c in zip(J(inner), br(x, y), br(J(x), J(y))))


class TestFixtures:
    def test_square_to_minus_id(self):
        for J in example_structures():
            assert J.squares_to_minus_id()

    def test_integrable(self):
        for J in example_structures():
            rep = is_integrable(G2, J)
            assert rep.integrable and rep.nijenhuis_zero and rep.first_failing_pair is None
            assert rep.pairs_checked == 15

    def test_printed_images(self):
        J, Jp = example_structures()
        assert J(e(3, 1)) == e(3, 2)
        assert Jp(e(3, 1)) == liealg.add(e(3, 1), e(3, 2))
        assert Jp(e(3, 2)) == liealg.sub(liealg.scale(-2, e(3, 1)), e(3, 2))

    def test_nijenhuis_on_fixture_pair(self):
        J, _ = example_structures()
        assert liealg.is_zero(nijenhuis(G2, J, e(1, 1), e(2, 1)))


class TestSwap:
    def test_value(self):
        # S e1(1) = e1(2), S e2(1) = e2(2); the cross-factor brackets vanish and
        # [Se1, Se2] = e3(2), S[Se1, e2] = S[e1, Se2] = 0, [e1, e2] = e3(1)
        S = swap_structure()
        assert nijenhuis(G2, S, e(1, 1), e(2, 1)) == liealg.sub(e(3, 1), e(3, 2))

    def test_report(self):
        rep = is_integrable(G2, swap_structure())
        assert rep.squares_to_minus_id and not rep.nijenhuis_zero
        assert rep.first_failing_pair == (0, 1)

    def test_report_invariant(self):
        from hcx.acstruct import AcsReport

        with pytest.raises(StructureError):
            AcsReport(True, True, (0, 1))


def test_nijenhuis_dimension_mismatch():
    J, _ = example_structures()
    with pytest.raises(StructureError):
        nijenhuis(liealg.su2_power(3), J, e(1, 1), e(2, 1))


def _random_rows(seed, n=6):
    rng = random.Random(seed)
    return [[Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(n)] for _ in range(n)]


@settings(max_examples=PROPERTY_CASES)
@given(st.integers(0, 2**32 - 1), vectors(6), vectors(6), vectors(6), rationals)
def test_nijenhuis_antisymmetric_and_bilinear(seed, x, y, z, c):
    M = Matrix.from_rows(_random_rows(seed))
    J = Endomorphism(M, G2)
    nxy = nijenhuis(G2, J, x, y)
    assert nxy == _nijenhuis_by_hand(M, x, y)
    assert liealg.scale(-1, nxy) == nijenhuis(G2, J, y, x)
    assert liealg.is_zero(nijenhuis(G2, J, x, x))
    cx_plus_z = liealg.add(liealg.scale(c, x), z)
    lhs = nijenhuis(G2, J, cx_plus_z, y)
    assert lhs == liealg.add(liealg.scale(c, nxy), nijenhuis(G2, J, z, y))


@settings(max_examples=200)
@given(st.integers(1, 3).flatmap(lambda n: invertible_matrices(2 * n)))
def test_complex_structures_on_abelian_algebras_are_integrable(P):
    n = P.rows
    rows = [[Fraction(0)] * n for _ in range(n)]
    for k in range(0, n, 2):
        rows[k + 1][k], rows[k][k + 1] = Fraction(1), Fraction(-1)
    J = Endomorphism(Matrix.from_rows(rows)).conjugate(P)
    rep = is_integrable(liealg.abelian(n), J)
    assert rep.squares_to_minus_id and rep.nijenhuis_zero


class TestHypercomplex:
    def test_abelian_quaternions(self):
        g = liealg.abelian(4)
        rep = is_hypercomplex(g, *standard_quaternions(1))
        assert rep.passed

    def test_j_j_minus_id_fails_anticommutation(self):
        J, _ = example_structures()
        rep = is_hypercomplex(G2, J, J, -Endomorphism.identity(6))
        failed = {c.name for c in rep.checks if not c.passed}
        assert "IJ + JI = 0" in failed
        assert not rep.passed

    def test_conjugated_triple_on_su2_4(self, su2_4):
        P = Matrix.from_rows([[1 if i == j else (1 if j == i + 1 else 0) for j in range(12)] for i in range(12)])
        I, J, K = conjugated_triple(P, su2_4)
        rep = is_hypercomplex(su2_4, I, J, K)
        assert rep.algebraic_passed and not rep.passed
        bad = rep.first_failure
        assert bad.name.startswith("integrability") and "N_" in bad.detail

    def test_dimension_mismatch(self, su2_4):
        with pytest.raises(StructureError):
            is_hypercomplex(su2_4, *standard_quaternions(1))


class TestInvariantForm:
    def test_standard_quaternions_give_four_eta(self):
        eta = BilinearForm.standard(4)
        form = invariant_inner_product(eta, *standard_quaternions(1))
        assert form.matrix == eta.matrix.scale(4)

    def test_rejects_broken_axioms(self):
        I, J, K = standard_quaternions(1)
        with pytest.raises(StructureError, match="IJ = K"):
            invariant_inner_product(BilinearForm.standard(4), I, J, -K)

    def test_rejects_indefinite_eta(self):
        eta = BilinearForm(Matrix.from_rows([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
        with pytest.raises(StructureError):
            invariant_inner_product(eta, *standard_quaternions(1))


@settings(max_examples=PROPERTY_CASES)
@given(st.sampled_from([4, 8]).flatmap(lambda n: st.tuples(invertible_matrices(n), vectors(n), vectors(n),
                                                             st.integers(0, 2**32 - 1))))
def test_invariant_inner_product_is_invariant(case):
    P, u, v, seed = case
    n = P.rows
    # a random positive definite eta = L L^T + id
    rng = random.Random(seed)
    L = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
    eta = BilinearForm(L @ L.T + Matrix.identity(n))
    I, J, K = conjugated_triple(P)
    form = invariant_inner_product(eta, I, J, K)
    assert form.is_positive_definite()
    for A in (I, J, K):
        assert form(A(u), A(v)) == form(u, v)
    assert form(u, v) == form(v, u)


def _check_decomposition(n, I, J, K, dec):
    assert len(dec.blocks) == n // 4
    basis = dec.basis()
    assert frac_rank(basis) == n
    B = Matrix.from_rows([list(x) for x in basis])
    gram = (B @ dec.form.matrix @ B.T).to_rows()
    # blocks are mutually orthogonal and each block basis is orthogonal
    for a in range(n):
        for b in range(n):
            if a != b:
                assert gram[a][b] == 0
    # each block is invariant under the triple
    for A in (I, J, K):
        images = (A.matrix @ B.T).T.to_rows()
        for k in range(0, n, 4):
            assert frac_rank([list(x) for x in basis[k:k + 4]] + images[k:k + 4]) == 4


class TestQuaternionicDecomposition:
    def test_r4(self):
        dec = quaternionic_decomposition(4, *standard_quaternions(1))
        assert len(dec.blocks) == 1

    def test_r8(self):
        I, J, K = standard_quaternions(2)
        dec = quaternionic_decomposition(8, I, J, K)
        _check_decomposition(8, I, J, K, dec)

    def test_r12_conjugated(self):
        P = Matrix.from_rows([[(i * 7 + j * 3) % 5 - 2 + (5 if i == j else 0) for j in range(12)] for i in range(12)])
        I, J, K = conjugated_triple(P)
        _check_decomposition(12, I, J, K, quaternionic_decomposition(12, I, J, K))

    def test_rejects_non_quaternionic(self):
        I, J, K = standard_quaternions(1)
        with pytest.raises(StructureError):
            quaternionic_decomposition(4, I, I, K)


@settings(max_examples=PROPERTY_CASES)
@given(st.sampled_from([4, 8, 12, 16, 20]).flatmap(invertible_matrices))
def test_quaternionic_decomposition_of_conjugated_triples(P):
    n = P.rows
    I, J, K = conjugated_triple(P)
    _check_decomposition(n, I, J, K, quaternionic_decomposition(n, I, J, K))


def test_doubled_fixture_is_integrable():
    J, Jp = example_structures()
    g4 = liealg.su2_power(4)
    for A in (doubled(J), doubled(Jp)):
        assert is_integrable(g4, A).integrable
