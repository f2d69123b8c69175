import random

import pytest

from hcx import liealg
from hcx.acstruct import conjugated_triple, doubled, example_structures, standard_quaternions, swap_structure
from hcx.liealg import Subspace
from hcx.nonexistence.structures import (
    DecompositionError,
    block_decompose,
    check_seven_conditions,
    formal_jacobi_check,
    hypercomplex_obstruction,
    same_invariant_subspace,
    subspace_dims,
    unique_invariant_subspace,
)
from hcx.scalarpoly import Matrix

G4 = liealg.su2_power(4)
FACTORS = [1, 2, 3, 4]


def fixtures():
    J, Jp = example_structures()
    return {"J": doubled(J), "J'": doubled(Jp)}


@pytest.fixture(scope="module", params=["J", "J'"])
def structure(request):
    return request.param, fixtures()[request.param]


@pytest.mark.parametrize("j", FACTORS)
def test_block_decomposition_reconstructs_images(structure, j):
    _, I = structure
    d = block_decompose(I, j)
    for i in (1, 2, 3):
        assert d.image(i) == I(G4.e(i, j))
        assert liealg.is_zero(liealg.component(G4, d.off_parts[i - 1], j))
    # coefficients are the factor-j coordinates of the block parts
    assert d.coefficients["b1"] == liealg.restrict(G4, d.B, j)[0]


@pytest.mark.parametrize("j", FACTORS)
def test_seven_conditions_hold(structure, j):
    _, I = structure
    cond = check_seven_conditions(I, j)
    assert cond.agree and all(cond)
    assert len(cond.values) == 7


@pytest.mark.parametrize("j", FACTORS)
def test_subspace_dims(structure, j):
    name, I = structure
    dim_e, dim_f = subspace_dims(block_decompose(I, j))
    assert dim_e >= 2 and dim_f == 1
    assert dim_e == (2 if name == "J" else 3)


@pytest.mark.parametrize("j", FACTORS)
def test_unique_invariant_subspace(structure, j):
    # both fixtures act on each factor pair with I e1 = e2 and keep span{e1, e2}
    _, I = structure
    got = unique_invariant_subspace(I, j)
    want = Subspace([G4.e(1, j), G4.e(2, j)], 12)
    assert got.factor == j and got.subspace == want
    assert same_invariant_subspace(I, j, want)
    assert not same_invariant_subspace(I, j, Subspace([G4.e(1, j), G4.e(3, j)], 12))


def test_j_factor_two_plane():
    got = unique_invariant_subspace(fixtures()["J"], 2).subspace
    assert got == Subspace([G4.e(1, 2), G4.e(2, 2)], 12)
    assert got.dim == 2 and not got.contains(G4.e(3, 2))


def test_non_integrable_rejected():
    S = doubled(swap_structure())
    with pytest.raises(DecompositionError):
        unique_invariant_subspace(S, 1)
    with pytest.raises(DecompositionError):
        check_seven_conditions(S, 1)


def test_wrong_algebra_rejected():
    with pytest.raises(DecompositionError):
        block_decompose(standard_quaternions(1)[0], 1)


@pytest.fixture(scope="module")
def triple():
    P = Matrix.from_rows([[1 if i == j or j == i + 1 else 0 for j in range(12)] for i in range(12)])
    return conjugated_triple(P, G4)


class TestObstruction:
    def test_integrability_failure_located(self, triple):
        rep = hypercomplex_obstruction(*triple, 1, 2)
        assert not rep.contradiction
        assert rep.failed_hypothesis == "integrability of I"
        assert rep.detail.startswith("at pair (e")

    def test_later_stage_without_integrability(self, triple):
        rep = hypercomplex_obstruction(*triple, 1, 2, check_integrability=False)
        assert rep.failed_hypothesis.startswith("invariant plane")

    def test_standard_triple_fails_integrability(self):
        I, J, K = (A.on(G4) for A in standard_quaternions(3))
        rep = hypercomplex_obstruction(I, J, K, 1, 2)
        assert rep.failed_hypothesis.startswith("integrability")

    def test_broken_axiom_reported_first(self, triple):
        I, J, K = triple
        rep = hypercomplex_obstruction(I, J, -K, 1, 2)
        assert rep.failed_hypothesis.startswith("quaternion axiom")

    def test_same_factor_rejected(self, triple):
        with pytest.raises(ValueError):
            hypercomplex_obstruction(*triple, 3, 3)

    def test_random_triples_fail_before_the_obstruction(self):
        rng = random.Random(2024)
        for _ in range(100):
            while True:
                P = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(12)] for _ in range(12)])
                if P.rank() == 12:
                    break
            rep = hypercomplex_obstruction(*conjugated_triple(P, G4), 1, 2)
            assert rep.failed_hypothesis.startswith("integrability of ")
            assert rep.detail.startswith("at pair (")

    def test_formal_jacobi_collapse(self):
        assert formal_jacobi_check()
