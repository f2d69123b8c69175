"""Concrete block analysis of a structure on su(2)^m.

For a factor j, ``I e_{i(j)}`` splits into a part inside the factor
(A_j, B_j, C_j) and a part outside it (X_j, Y_j, Z_j).  The helpers here
compute that split, the spaces E_j = span{A,B,C} and F_j = span{X,Y,Z},
the I-invariant plane of the factor and the two-factor obstruction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .. import liealg
from ..acstruct import Endomorphism, describe_basis_index, is_integrable, quaternion_axiom_checks
from ..formal import Expr, Term
from ..liealg import LieAlgebra, Subspace, Vec
from ..scalarpoly import Matrix, Polynomial
from .system import LETTERS, ConstraintSystem


class DecompositionError(ValueError):
    pass


def _check_su2_power(I: Endomorphism) -> LieAlgebra:
    g = I.algebra
    if g is None or g.factor_layout is None:
        raise DecompositionError("structure must carry an su(2)^m algebra with a factor layout")
    m = len(g.factor_layout)
    ref = liealg.su2_power(m)
    if g.dim != 3 * m or g.factor_layout != ref.factor_layout or g.structure != ref.structure:
        raise DecompositionError("ambient algebra is not su(2)^m in the standard basis")
    return g


@dataclass(frozen=True)
class BlockDecomposition:
    factor: int
    A: Vec
    B: Vec
    C: Vec
    X: Vec
    Y: Vec
    Z: Vec
    coefficients: dict  # "a1" .. "c3" -> Fraction

    @property
    def block_parts(self) -> tuple[Vec, Vec, Vec]:
        return self.A, self.B, self.C

    @property
    def off_parts(self) -> tuple[Vec, Vec, Vec]:
        return self.X, self.Y, self.Z

    def image(self, i: int) -> Vec:
        """Reconstruct I e_{i(j)} (i = 1, 2, 3)."""
        return liealg.add(self.block_parts[i - 1], self.off_parts[i - 1])

    def scalar_assignment(self, suffix: str = "j") -> dict:
        return {f"{name}{suffix}": v for name, v in self.coefficients.items()}

    def vector_assignment(self, suffix: str = "j") -> dict:
        return {f"{s}{suffix}": v for s, v in zip("XYZ", self.off_parts)}


def block_decompose(I: Endomorphism, j: int) -> BlockDecomposition:
    g = _check_su2_power(I)
    parts, offs, coeffs = [], [], {}
    for i, letter in zip((1, 2, 3), LETTERS):
        v = I(g.e(i, j))
        inside = liealg.component(g, v, j)
        parts.append(inside)
        offs.append(liealg.sub(v, inside))
        for r, c in enumerate(liealg.restrict(g, v, j), start=1):
            coeffs[f"{letter}{r}"] = c
    return BlockDecomposition(j, *parts, *offs, coeffs)


def subspace_dims(d: BlockDecomposition) -> tuple[int, int]:
    """(dim E_j, dim F_j)."""
    return liealg.vectors_rank(d.block_parts), liealg.vectors_rank(d.off_parts)


# ---------------------------------------------------------------------------
# evaluating symbolic equations on a concrete decomposition


def _eval_term(t: Term, vectors: dict, g: LieAlgebra) -> Vec:
    if t[0] == "atom":
        return vectors[t[1]]
    if t[0] == "br":
        return g.bracket(_eval_term(t[1], vectors, g), _eval_term(t[2], vectors, g))
    raise ValueError(f"operator term {t} has no concrete value here")


def evaluate_expr(e: Expr, scalars: dict, vectors: dict, g: LieAlgebra):
    """Fraction for scalar expressions, Vec for vector expressions."""
    if e.is_scalar():
        return e.as_scalar().evaluate(scalars)
    out = liealg.zero(g.dim)
    for t, c in e.items():
        if t is None:
            raise ValueError("mixed scalar/vector expression")
        out = liealg.add(out, liealg.scale(c.evaluate(scalars), _eval_term(t, vectors, g)))
    return out


def evaluate_system(system: ConstraintSystem, d: BlockDecomposition, g: LieAlgebra) -> list:
    """[(label, value)] for all twelve equations at the decomposition."""
    scalars = d.scalar_assignment(system.factor)
    vectors = d.vector_assignment(system.factor)
    return [(label, evaluate_expr(e, scalars, vectors, g)) for label, e in system.all_equations()]


# ---------------------------------------------------------------------------
# invariant planes and the seven conditions


def _kernel(d: BlockDecomposition) -> list[Vec]:
    """Coefficient vectors (a,b,c) with a X + b Y + c Z = 0."""
    return Matrix.from_columns([list(v) for v in d.off_parts]).nullspace()


def is_invariant(I: Endomorphism, s: Subspace) -> bool:
    return all(s.contains(I(v)) for v in s.basis)


def invariant_plane(I: Endomorphism, j: int) -> Subspace | None:
    """The I-invariant 2-dim subspace of factor j, if there is one.

    Any invariant subspace of the factor consists of vectors u with Iu in the
    factor, i.e. lies in the kernel of the off-factor map.  So there is one
    exactly when that kernel is an invariant plane.
    """
    g = _check_su2_power(I)
    d = block_decompose(I, j)
    ker = _kernel(d)
    if len(ker) != 2:
        return None
    m = len(g.factor_layout)
    plane = Subspace([liealg.inject(k, j, m) for k in ker], g.dim)
    return plane if is_invariant(I, plane) else None


@dataclass(frozen=True)
class SevenConditions:
    factor: int
    values: tuple  # booleans (i) .. (vii)

    NAMES = (
        "(i) nonzero u in the factor with Iu in the factor",
        "(ii) unique I-invariant plane in the factor",
        "(iii) dim F_j = 1",
        "(iv) X, Y, Z dependent",
        "(v) [X,Y] = [Z,X] = 0",
        "(vi) [X,Y] = [Y,Z] = 0",
        "(vii) [Y,Z] = [Z,X] = 0",
    )

    @property
    def agree(self) -> bool:
        return len(set(self.values)) == 1

    def __iter__(self):
        return iter(self.values)


def check_seven_conditions(I: Endomorphism, j: int) -> SevenConditions:
    g = _check_su2_power(I)
    rep = is_integrable(g, I)
    if not rep.integrable:
        raise DecompositionError("the seven conditions are only equivalent for integrable structures")
    d = block_decompose(I, j)
    ker = _kernel(d)
    X, Y, Z = d.off_parts
    zero = liealg.is_zero
    xy, yz, zx = g.bracket(X, Y), g.bracket(Y, Z), g.bracket(Z, X)
    rank_f = liealg.vectors_rank(d.off_parts)
    values = (
        len(ker) >= 1,
        invariant_plane(I, j) is not None,
        rank_f == 1,
        rank_f <= 2,
        zero(xy) and zero(zx),
        zero(xy) and zero(yz),
        zero(yz) and zero(zx),
    )
    return SevenConditions(j, values)


@dataclass(frozen=True)
class InvariantSubspace:
    factor: int
    subspace: Subspace


def unique_invariant_subspace(I: Endomorphism, j: int) -> InvariantSubspace:
    g = _check_su2_power(I)
    if not is_integrable(g, I).integrable:
        raise DecompositionError("structure is not integrable")
    d = block_decompose(I, j)
    dim_f = subspace_dims(d)[1]
    if dim_f != 1:
        raise DecompositionError(f"dim F_{j} = {dim_f} contradicts the absence of real solutions of the factor system")
    plane = invariant_plane(I, j)
    if plane is None:
        raise DecompositionError(f"kernel in factor {j} is not I-invariant")
    return InvariantSubspace(j, plane)


def same_invariant_subspace(I: Endomorphism, j: int, candidate: Subspace) -> bool:
    """True iff ``candidate`` is a 2-dim I-invariant subspace of factor j;
    it then necessarily equals the computed one."""
    g = _check_su2_power(I)
    inside = all(liealg.is_zero(liealg.off_block(g, v, j)) for v in candidate.basis)
    if candidate.dim != 2 or not inside or not is_invariant(I, candidate):
        return False
    expected = unique_invariant_subspace(I, j).subspace
    if candidate != expected:
        raise AssertionError("two different invariant planes in one factor")
    return True


# ---------------------------------------------------------------------------
# the two-factor obstruction


@dataclass
class ObstructionReport:
    j: int
    k: int
    E_j: Vec | None = None
    lambda_jk: Fraction | None = None
    jacobi_residual: Vec | None = None
    failed_hypothesis: str | None = None
    detail: str = ""

    @property
    def contradiction(self) -> bool:
        return self.failed_hypothesis is None and self.jacobi_residual is not None \
            and not liealg.is_zero(self.jacobi_residual)

    def message(self) -> str:
        if self.failed_hypothesis is not None:
            text = f"hypothesis '{self.failed_hypothesis}' failed"
            return f"{text} {self.detail}" if self.detail else text
        return (f"ad(K E_{self.j}) = {self.lambda_jk} id on factor {self.k}; "
                f"Jacobi sum = {liealg.format_vec(self.jacobi_residual)}, which is a contradiction")


def _line_vector(s: Subspace) -> Vec:
    """Echelon basis vector of a line; its first nonzero entry is 1."""
    return s.basis[0]


def _ad_scalar(g: LieAlgebra, x: Vec, k: int) -> Fraction | None:
    """lam with [x, v] = lam v for all v in factor k, or None."""
    lam = None
    for i in (1, 2, 3):
        v = g.e(i, k)
        w = g.bracket(x, v)
        c = w[g.block(k)[i - 1]]
        if w != liealg.scale(c, v) or (lam is not None and c != lam):
            return None
        lam = c
    return lam


def hypercomplex_obstruction(I: Endomorphism, J: Endomorphism, K: Endomorphism, j: int, k: int,
                             check_integrability: bool = True) -> ObstructionReport:
    """Walk the hypotheses of the two-factor argument and report the first
    that fails, or the Jacobi contradiction when all of them hold."""
    if j == k:
        raise ValueError("factors j and k must differ")
    g = _check_su2_power(I)
    rep = ObstructionReport(j, k)
    for c in quaternion_axiom_checks(I, J, K):
        if not c.passed:
            rep.failed_hypothesis = f"quaternion axiom {c.name}"
            return rep
    if check_integrability:
        for name, s in (("I", I), ("J", J), ("K", K)):
            r = is_integrable(g, s)
            if not r.nijenhuis_zero:
                a, b = r.first_failing_pair
                rep.failed_hypothesis = f"integrability of {name}"
                rep.detail = f"at pair ({describe_basis_index(g, a)}, {describe_basis_index(g, b)})"
                return rep
    planes = {}
    for f in (j, k):
        for name, s in (("I", I), ("J", J)):
            p = invariant_plane(s.on(g), f)
            if p is None:
                rep.failed_hypothesis = f"invariant plane of {name} in factor {f}"
                return rep
            planes[name, f] = p
    lines = {}
    for f in (j, k):
        line = planes["I", f].intersect(planes["J", f])
        if line.dim != 1:
            rep.failed_hypothesis = f"invariant planes of I and J meet in a line in factor {f}"
            return rep
        lines[f] = _line_vector(line)
    rep.E_j = lines[j]
    KE = K(rep.E_j)
    lam = _ad_scalar(g, KE, k)
    if lam is None:
        rep.failed_hypothesis = f"ad(K E_{j}) is a scalar on factor {k}"
        return rep
    rep.lambda_jk = lam
    E_k = lines[k]
    IE_k = I(E_k)
    rep.jacobi_residual = liealg.scale(lam, g.bracket(IE_k, E_k))
    if lam == 0:
        rep.failed_hypothesis = f"ad(K E_{j}) nonzero on factor {k}"
    return rep


def formal_jacobi_check() -> bool:
    """Verify in coordinates that, when ad(KE_j) acts as lam*id on su(2)_k,
    the cyclic Jacobi sum for IE_k, KE_j, E_k collapses to lam [IE_k, E_k].

    E_k = (p1,p2,p3) and IE_k = (q1,q2,q3) are generic; su(2)_k's bracket is
    the cross product.
    """
    p = tuple(Polynomial.var(f"p{i}") for i in (1, 2, 3))
    q = tuple(Polynomial.var(f"q{i}") for i in (1, 2, 3))
    lam = Polynomial.var("lam")

    def cross(x, y):
        return (x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])

    def sc(c, x):
        return tuple(c * a for a in x)

    def ad(x):  # ad(KE_j) restricted to the factor
        return sc(lam, x)

    # [IE_k,[KE_j,E_k]] + [KE_j,[E_k,IE_k]] + [E_k,[IE_k,KE_j]]
    t1 = cross(q, ad(p))
    t2 = ad(cross(p, q))
    t3 = cross(p, sc(Polynomial.const(-1), ad(q)))
    total = tuple(a + b + c for a, b, c in zip(t1, t2, t3))
    return total == sc(lam, cross(q, p))
