"""Almost complex and hypercomplex structures on a Lie algebra.

Matrices act on column vectors: column ``i`` of an endomorphism's matrix is
the image of the basis vector ``e_i``.  The Nijenhuis tensor uses the
unnormalised convention ``N(X,Y) = J[JX,Y] + J[X,JY] + [X,Y] - [JX,JY]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import liealg
from .liealg import LieAlgebra, Subspace, Vec
from .scalarpoly import Matrix, format_rational, to_rational


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class Endomorphism:
    matrix: Matrix
    algebra: LieAlgebra | None = None

    def __post_init__(self):
        if not self.matrix.is_square():
            raise StructureError(f"endomorphism matrix must be square, got {self.matrix.shape}")
        if self.algebra is not None and self.algebra.dim != self.matrix.rows:
            raise StructureError(f"matrix size {self.matrix.rows} does not match algebra dim {self.algebra.dim}")

    @property
    def dim(self) -> int:
        return self.matrix.rows

    @classmethod
    def from_images(cls, images: Sequence[Vec], algebra: LieAlgebra | None = None) -> "Endomorphism":
        """images[i] is the image of the i-th basis vector."""
        return cls(Matrix.from_columns([list(v) for v in images]), algebra)

    @classmethod
    def identity(cls, n: int, algebra: LieAlgebra | None = None) -> "Endomorphism":
        return cls(Matrix.identity(n), algebra)

    def __call__(self, v: Vec) -> Vec:
        return self.matrix.apply(v)

    def __matmul__(self, other: "Endomorphism") -> "Endomorphism":
        return Endomorphism(self.matrix @ other.matrix, self.algebra or other.algebra)

    def __add__(self, other: "Endomorphism") -> "Endomorphism":
        return Endomorphism(self.matrix + other.matrix, self.algebra or other.algebra)

    def __neg__(self) -> "Endomorphism":
        return Endomorphism(-self.matrix, self.algebra)

    def __eq__(self, other) -> bool:
        return isinstance(other, Endomorphism) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def on(self, algebra: LieAlgebra) -> "Endomorphism":
        return Endomorphism(self.matrix, algebra)

    def squares_to_minus_id(self) -> bool:
        return self.matrix @ self.matrix == -Matrix.identity(self.dim)

    def conjugate(self, p: Matrix, p_inv: Matrix | None = None) -> "Endomorphism":
        p_inv = p.inverse() if p_inv is None else p_inv
        return Endomorphism(p @ self.matrix @ p_inv, self.algebra)

    def to_json(self) -> dict:
        return {"dim": self.dim, "matrix": [[format_rational(x) for x in r] for r in self.matrix.to_rows()]}

    @classmethod
    def from_json(cls, data: dict, algebra: LieAlgebra | None = None) -> "Endomorphism":
        try:
            n = int(data["dim"])
            rows = [[to_rational(str(x)) for x in r] for r in data["matrix"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed endomorphism JSON: {exc}") from exc
        if len(rows) != n or any(len(r) != n for r in rows):
            raise StructureError(f"matrix is not {n}x{n}")
        return cls(Matrix.from_rows(rows), algebra)

    @classmethod
    def load(cls, path: str, algebra: LieAlgebra | None = None) -> "Endomorphism":
        with open(path) as fh:
            return cls.from_json(json.load(fh), algebra)


def block_diagonal(*parts: Endomorphism, algebra: LieAlgebra | None = None) -> Endomorphism:
    n = sum(p.dim for p in parts)
    rows = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for p in parts:
        for i in range(p.dim):
            for j in range(p.dim):
                rows[off + i][off + j] = p.matrix[i, j]
        off += p.dim
    return Endomorphism(Matrix.from_rows(rows), algebra)


# ---------------------------------------------------------------------------
# Nijenhuis tensor and integrability


def nijenhuis(g: LieAlgebra, J: Endomorphism, x: Vec, y: Vec) -> Vec:
    if J.dim != g.dim or len(x) != g.dim or len(y) != g.dim:
        raise StructureError("dimension mismatch in Nijenhuis tensor")
    jx, jy = J(x), J(y)
    inner = liealg.add(g.bracket(jx, y), g.bracket(x, jy))
    return liealg.sub(liealg.add(J(inner), g.bracket(x, y)), g.bracket(jx, jy))


@dataclass
class AcsReport:
    squares_to_minus_id: bool
    nijenhuis_zero: bool
    first_failing_pair: tuple[int, int] | None = None
    failing_value: Vec | None = None
    pairs_checked: int = 0

    @property
    def integrable(self) -> bool:
        return self.squares_to_minus_id and self.nijenhuis_zero

    def __post_init__(self):
        if self.nijenhuis_zero and self.first_failing_pair is not None:
            raise StructureError("a vanishing Nijenhuis tensor has no failing pair")


def is_integrable(g: LieAlgebra, J: Endomorphism) -> AcsReport:
    sq = J.squares_to_minus_id()
    images = [J(g.basis(i)) for i in range(g.dim)]
    checked = 0
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            checked += 1
            ei, ej = g.basis(i), g.basis(j)
            inner = liealg.add(g.bracket(images[i], ej), g.bracket(ei, images[j]))
            n = liealg.sub(liealg.add(J(inner), g.bracket(ei, ej)), g.bracket(images[i], images[j]))
            if not liealg.is_zero(n):
                return AcsReport(sq, False, (i, j), n, checked)
    return AcsReport(sq, True, None, None, checked)


def describe_basis_index(g: LieAlgebra, i: int) -> str:
    """``e2(1)`` style name of raw coordinate i (1-based in the text)."""
    if g.factor_layout is None:
        return f"e{i + 1}"
    for n, (off, size) in enumerate(g.factor_layout, start=1):
        if off <= i < off + size:
            return f"e{i - off + 1}({n})"
    return f"e{i + 1}"


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class HypercomplexReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def algebraic_passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.name.startswith("integrability"))

    @property
    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)


def quaternion_axiom_checks(I: Endomorphism, J: Endomorphism, K: Endomorphism) -> list[Check]:
    n = I.dim
    minus_id = -Matrix.identity(n)
    zero = Matrix.zeros(n, n)
    a, b, c = I.matrix, J.matrix, K.matrix
    return [
        Check("I^2 = -id", a @ a == minus_id),
        Check("J^2 = -id", b @ b == minus_id),
        Check("K^2 = -id", c @ c == minus_id),
        Check("IJ = K", a @ b == c),
        Check("IJ + JI = 0", a @ b + b @ a == zero),
        Check("IK + KI = 0", a @ c + c @ a == zero),
        Check("JK + KJ = 0", b @ c + c @ b == zero),
    ]


def is_hypercomplex(g: LieAlgebra, I: Endomorphism, J: Endomorphism, K: Endomorphism) -> HypercomplexReport:
    if not (I.dim == J.dim == K.dim == g.dim):
        raise StructureError("dimension mismatch between algebra and structures")
    report = HypercomplexReport(quaternion_axiom_checks(I, J, K))
    for name, s in (("I", I), ("J", J), ("K", K)):
        r = is_integrable(g, s)
        detail = ""
        if r.first_failing_pair is not None:
            i, j = r.first_failing_pair
            detail = f"N_{name}({describe_basis_index(g, i)}, {describe_basis_index(g, j)}) != 0"
        report.checks.append(Check(f"integrability of {name}", r.nijenhuis_zero, detail))
    return report


# ---------------------------------------------------------------------------
# invariant inner product and quaternionic decomposition


@dataclass(frozen=True)
class BilinearForm:
    matrix: Matrix

    def __post_init__(self):
        if not self.matrix.is_symmetric():
            raise StructureError("bilinear form must be symmetric")

    def __call__(self, u: Vec, v: Vec) -> Fraction:
        return sum((a * b for a, b in zip(u, self.matrix.apply(v)) if a and b), Fraction(0))

    def is_positive_definite(self) -> bool:
        return self.matrix.is_positive_definite()

    @classmethod
    def standard(cls, n: int) -> "BilinearForm":
        return cls(Matrix.identity(n))


def invariant_inner_product(eta: BilinearForm, I: Endomorphism, J: Endomorphism, K: Endomorphism) -> BilinearForm:
    """<u,v> = eta(u,v) + eta(Iu,Iv) + eta(Ju,Jv) + eta(Ku,Kv)."""
    if not eta.is_positive_definite():
        raise StructureError("eta is not positive definite")
    failed = [c.name for c in quaternion_axiom_checks(I, J, K) if not c.passed]
    if failed:
        raise StructureError(f"quaternion axiom violated: {failed[0]}")
    m = eta.matrix
    for A in (I, J, K):
        m = m + A.matrix.T @ eta.matrix @ A.matrix
    return BilinearForm(m)


@dataclass
class QuaternionicDecomposition:
    blocks: list[tuple[Vec, Vec, Vec, Vec]]
    form: BilinearForm

    def basis(self) -> list[Vec]:
        return [v for blk in self.blocks for v in blk]


def quaternionic_decomposition(dim: int, I: Endomorphism, J: Endomorphism, K: Endomorphism,
                               eta: BilinearForm | None = None) -> QuaternionicDecomposition:
    """Split the space into mutually orthogonal blocks {v, Iv, Jv, Kv}.

    The pivot v is the projection onto the current complement of the first
    standard basis vector whose projection is nonzero.  Found blocks are
    orthogonal with equal norms inside a block, so projecting onto their
    span needs no linear solve.
    """
    eta = BilinearForm.standard(dim) if eta is None else eta
    form = invariant_inner_product(eta, I, J, K)
    G = form.matrix
    found: list[tuple[Vec, Vec, Fraction]] = []  # (w, G w, <w, w>)
    blocks = []
    while len(blocks) * 4 < dim:
        v = None
        for i in range(dim):
            # e_i minus its projection onto the span of the blocks so far
            cand = [Fraction(int(i == a)) for a in range(dim)]
            for w, Gw, nw in found:
                c = Gw[i] / nw
                if c:
                    for a, x in enumerate(w):
                        if x:
                            cand[a] -= c * x
            if any(cand):
                v = tuple(cand)
                break
        if v is None:
            raise StructureError("blocks span less than the whole space; axioms inconsistent")
        blk = (v, I(v), J(v), K(v))
        images = [G.apply(u) for u in blk]
        for a in range(4):
            for b in range(a + 1, 4):
                if sum(x * y for x, y in zip(blk[a], images[b])) != 0:
                    raise StructureError("block vectors are not orthogonal; axioms inconsistent")
        for u, Gu in zip(blk, images):
            found.append((u, Gu, sum(x * y for x, y in zip(u, Gu))))
        blocks.append(blk)
    assert liealg.vectors_rank([u for blk in blocks for u in blk]) == dim, "blocks do not form a basis"
    return QuaternionicDecomposition(blocks, form)


# ---------------------------------------------------------------------------
# fixtures


def _images(g: LieAlgebra, spec: dict) -> list[Vec]:
    """spec maps (i, j) -> list of (coeff, (i', j')) giving J e_{i(j)}."""
    out = [None] * g.dim
    for (i, j), combo in spec.items():
        v = liealg.zero(g.dim)
        for c, (a, b) in combo:
            v = liealg.add(v, liealg.scale(c, g.e(a, b)))
        out[g.block(j)[i - 1]] = v
    return out


def example_structures() -> tuple[Endomorphism, Endomorphism]:
    """The complex structures J (dim E_j = 2) and J' (dim E_j = 3) on su(2)+su(2)."""
    g = liealg.su2_power(2)
    J = _images(g, {
        (1, 1): [(1, (2, 1))], (2, 1): [(-1, (1, 1))], (3, 1): [(1, (3, 2))],
        (1, 2): [(1, (2, 2))], (2, 2): [(-1, (1, 2))], (3, 2): [(-1, (3, 1))],
    })
    Jp = _images(g, {
        (1, 1): [(1, (2, 1))], (2, 1): [(-1, (1, 1))], (3, 1): [(1, (3, 1)), (1, (3, 2))],
        (1, 2): [(1, (2, 2))], (2, 2): [(-1, (1, 2))], (3, 2): [(-2, (3, 1)), (-1, (3, 2))],
    })
    return Endomorphism.from_images(J, g), Endomorphism.from_images(Jp, g)


def swap_structure(g: LieAlgebra | None = None) -> Endomorphism:
    """S e_{i(1)} = e_{i(2)}, S e_{i(2)} = -e_{i(1)} on su(2)+su(2)."""
    g = liealg.su2_power(2) if g is None else g
    return Endomorphism.from_images(
        _images(g, {(i, 1): [(1, (i, 2))] for i in (1, 2, 3)} | {(i, 2): [(-1, (i, 1))] for i in (1, 2, 3)}), g)


def doubled(J: Endomorphism) -> Endomorphism:
    """J + J on su(2)^(2m) for J on su(2)^m."""
    m = J.dim // 3
    return block_diagonal(J, J, algebra=liealg.su2_power(2 * m))


def standard_quaternions(blocks: int = 1) -> tuple[Endomorphism, Endomorphism, Endomorphism]:
    """Left multiplication by i, j, k on H^blocks in the basis (1, i, j, k)."""
    Li = Matrix.from_columns([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
    Lj = Matrix.from_columns([[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]])
    Lk = Matrix.from_columns([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])
    return tuple(block_diagonal(*[Endomorphism(m)] * blocks) for m in (Li, Lj, Lk))


def conjugated_triple(p: Matrix, algebra: LieAlgebra | None = None):
    n = p.rows
    if n % 4:
        raise StructureError("dimension must be a multiple of 4")
    p_inv = p.inverse()
    return tuple(Endomorphism(p @ q.matrix @ p_inv, algebra) for q in standard_quaternions(n // 4))
