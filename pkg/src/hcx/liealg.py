"""Lie algebras given by structure constants, with su(2)^m as the main case.

Vectors are tuples of :class:`~fractions.Fraction` in the algebra's basis.
Factor indices ``j`` are 1-based (``e_{i(j)}``);
raw coordinate indices are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .scalarpoly import Matrix, format_rational, to_rational

Vec = tuple


class LieAlgebraError(ValueError):
    pass


def vec(*xs) -> Vec:
    return tuple(to_rational(x) for x in xs)


def zero(n: int) -> Vec:
    return (Fraction(0),) * n


def add(x: Vec, y: Vec) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: Vec, y: Vec) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def scale(c, x: Vec) -> Vec:
    c = to_rational(c)
    return tuple(c * a for a in x)


def is_zero(x: Vec) -> bool:
    return all(a == 0 for a in x)


def cross(x: Vec, y: Vec) -> Vec:
    """Right-hand cross product in R^3."""
    return (x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])


@dataclass(frozen=True)
class LieAlgebra:
    """``structure[(i, j, k)] = c`` means ``[e_i, e_j]`` has ``c`` on ``e_k``.

    Only nonzero constants are stored; both orders (i, j) and (j, i) are kept.
    """

    dim: int
    structure: dict = field(hash=False)
    factor_layout: tuple | None = None

    def __post_init__(self):
        for (i, j, k), c in self.structure.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim and 0 <= k < self.dim):
                raise LieAlgebraError(f"structure index ({i},{j},{k}) out of range for dim {self.dim}")
            if c == 0:
                raise LieAlgebraError("zero structure constant stored")
        if self.factor_layout is not None:
            covered = [i for off, size in self.factor_layout for i in range(off, off + size)]
            if covered != list(range(self.dim)):
                raise LieAlgebraError("factor_layout must tile the basis in order")
        by_first: dict = {}
        for (i, j, k), c in self.structure.items():
            by_first.setdefault(i, []).append((j, k, c))
        object.__setattr__(self, "_by_first", by_first)

    @classmethod
    def from_constants(cls, dim: int, constants: Iterable, factor_layout=None) -> "LieAlgebra":
        """Build from (i, j, k, c) entries; missing (j, i, k) entries are
        filled by antisymmetry, conflicting ones are rejected."""
        s: dict = {}
        for i, j, k, c in constants:
            c = to_rational(c)
            if c == 0:
                continue
            for key, val in (((i, j, k), c), ((j, i, k), -c)):
                if key in s and s[key] != val:
                    raise LieAlgebraError(f"structure constants not antisymmetric at {key}")
                s[key] = val
        return cls(dim, s, tuple(factor_layout) if factor_layout is not None else None)

    def c(self, i: int, j: int, k: int) -> Fraction:
        return self.structure.get((i, j, k), Fraction(0))

    @property
    def num_factors(self) -> int:
        if self.factor_layout is None:
            raise LieAlgebraError("algebra has no factor layout")
        return len(self.factor_layout)

    def block(self, j: int) -> range:
        """Coordinate range of factor j (1-based)."""
        if self.factor_layout is None:
            raise LieAlgebraError("algebra has no factor layout")
        if not 1 <= j <= len(self.factor_layout):
            raise LieAlgebraError(f"factor index {j} out of range 1..{len(self.factor_layout)}")
        off, size = self.factor_layout[j - 1]
        return range(off, off + size)

    def basis(self, i: int) -> Vec:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return tuple(v)

    def e(self, i: int, j: int) -> Vec:
        """``e_{i(j)}``: i-th basis vector (1-based) of factor j (1-based)."""
        b = self.block(j)
        if not 1 <= i <= len(b):
            raise LieAlgebraError(f"basis index {i} out of range for factor {j}")
        return self.basis(b[i - 1])

    def bracket(self, x: Vec, y: Vec) -> Vec:
        if len(x) != self.dim or len(y) != self.dim:
            raise LieAlgebraError(f"dimension mismatch: {len(x)}, {len(y)} vs algebra dim {self.dim}")
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, k, c in self._by_first.get(i, ()):
                yj = y[j]
                if yj:
                    out[k] += c * xi * yj
        return tuple(out)

    def is_antisymmetric(self) -> bool:
        return all(self.c(j, i, k) == -c for (i, j, k), c in self.structure.items())

    def jacobi_violations(self) -> list[tuple[int, int, int]]:
        """Basis triples where the cyclic double bracket sum is nonzero."""
        bad = []
        for a, b, c in combinations(range(self.dim), 3):
            ea, eb, ec = self.basis(a), self.basis(b), self.basis(c)
            s = add(add(self.bracket(ea, self.bracket(eb, ec)), self.bracket(eb, self.bracket(ec, ea))),
                    self.bracket(ec, self.bracket(ea, eb)))
            if not is_zero(s):
                bad.append((a, b, c))
        return bad

    def respects_layout(self) -> bool:
        if self.factor_layout is None:
            return True
        owner = {}
        for n, (off, size) in enumerate(self.factor_layout):
            for i in range(off, off + size):
                owner[i] = n
        return all(owner[i] == owner[j] == owner[k] for (i, j, k) in self.structure)

    def is_abelian(self) -> bool:
        return not self.structure

    def structure_array(self):
        import numpy as np

        arr = np.zeros((self.dim, self.dim, self.dim))
        for (i, j, k), c in self.structure.items():
            arr[i, j, k] = float(c)
        return arr

    def nonzero_constants(self) -> list[tuple[int, int, int, Fraction]]:
        return sorted((i, j, k, c) for (i, j, k), c in self.structure.items())

    # -- JSON ------------------------------------------------------------------
    def to_json(self) -> dict:
        d = {
            "dim": self.dim,
            "structure": [[i, j, k, format_rational(c)] for i, j, k, c in self.nonzero_constants()],
        }
        if self.factor_layout is not None:
            d["factor_layout"] = [list(b) for b in self.factor_layout]
        return d

    @classmethod
    def from_json(cls, data: dict) -> "LieAlgebra":
        if "su2_power" in data:
            return su2_power(int(data["su2_power"]))
        try:
            dim = int(data["dim"])
            entries = [(int(i), int(j), int(k), to_rational(str(c))) for i, j, k, c in data["structure"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise LieAlgebraError(f"malformed Lie algebra JSON: {exc}") from exc
        layout = data.get("factor_layout")
        return cls.from_constants(dim, entries, [tuple(b) for b in layout] if layout else None)


def su2() -> LieAlgebra:
    """[e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2."""
    return LieAlgebra.from_constants(3, [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)], [(0, 3)])


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(n, {}, None)


def direct_sum(factors: Sequence[LieAlgebra]) -> LieAlgebra:
    consts, layout, off = [], [], 0
    for g in factors:
        for i, j, k, c in g.nonzero_constants():
            consts.append((off + i, off + j, off + k, c))
        layout.append((off, g.dim))
        off += g.dim
    return LieAlgebra.from_constants(off, consts, layout)


def su2_power(m: int) -> LieAlgebra:
    if m < 0:
        raise LieAlgebraError("negative factor count")
    return direct_sum([su2()] * m)


def parse_algebra_spec(spec: str) -> LieAlgebra:
    """``"su2^m"`` or a path to a LieAlgebra JSON file."""
    s = spec.strip()
    if s.startswith("su2^"):
        return su2_power(int(s[4:]))
    if s == "su2":
        return su2()
    with open(s) as fh:
        return LieAlgebra.from_json(json.load(fh))


def bracket(g: LieAlgebra, x: Vec, y: Vec) -> Vec:
    return g.bracket(x, y)


def inject(x: Vec, j: int, m: int) -> Vec:
    """Place an su(2) vector in factor j (1-based) of su(2)^m."""
    if len(x) != 3:
        raise LieAlgebraError("inject expects an su(2) vector")
    if not 1 <= j <= m:
        raise LieAlgebraError(f"factor index {j} out of range 1..{m}")
    out = [Fraction(0)] * (3 * m)
    out[3 * (j - 1):3 * j] = x
    return tuple(out)


def component(g: LieAlgebra, x: Vec, j: int) -> Vec:
    """Keep block j of x and zero the rest (``X^{(j)}``)."""
    b = g.block(j)
    return tuple(a if i in b else Fraction(0) for i, a in enumerate(x))


def restrict(g: LieAlgebra, x: Vec, j: int) -> Vec:
    """Coordinates of block j of x, as a vector of the factor."""
    return tuple(x[i] for i in g.block(j))


def off_block(g: LieAlgebra, x: Vec, j: int) -> Vec:
    return sub(x, component(g, x, j))


def vectors_rank(vectors: Sequence[Vec]) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    return Matrix.from_rows(vectors).rank()


def independent_iff_bracket_nonzero(x: Vec, y: Vec) -> tuple[bool, bool]:
    """(x, y independent, [x, y] != 0) in su(2); the two always agree."""
    g = su2()
    independent = vectors_rank([x, y]) == 2
    b = g.bracket(x, y)
    nonzero = not is_zero(b)
    if nonzero and vectors_rank([x, y, b]) != 3:
        raise AssertionError("x, y, [x,y] failed to be a basis of su(2)")
    return independent, nonzero


class Subspace:
    """Subspace stored by its reduced row-echelon basis (canonical)."""

    __slots__ = ("ambient", "basis")

    def __init__(self, vectors: Iterable[Vec], ambient: int | None = None):
        vectors = [tuple(to_rational(a) for a in v) for v in vectors]
        if ambient is None:
            if not vectors:
                raise LieAlgebraError("ambient dimension required for an empty spanning set")
            ambient = len(vectors[0])
        self.ambient = ambient
        if vectors:
            red, piv = Matrix.from_rows(vectors).rref()
            self.basis = tuple(red.row(i) for i in range(len(piv)))
        else:
            self.basis = ()

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Vec) -> bool:
        return Subspace(self.basis + (tuple(v),), self.ambient).dim == self.dim

    def __contains__(self, v: Vec) -> bool:
        return self.contains(v)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient, self.basis))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.basis + other.basis, self.ambient)

    def intersect(self, other: "Subspace") -> "Subspace":
        if not self.basis or not other.basis:
            return Subspace((), self.ambient)
        # x = sum a_i u_i = sum b_j w_j
        cols = [list(u) for u in self.basis] + [[-a for a in w] for w in other.basis]
        null = Matrix.from_columns(cols).nullspace()
        vecs = []
        for coeffs in null:
            v = zero(self.ambient)
            for c, u in zip(coeffs[: self.dim], self.basis):
                v = add(v, scale(c, u))
            vecs.append(v)
        return Subspace(vecs, self.ambient)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, basis={[[format_rational(a) for a in v] for v in self.basis]})"


def brackets_of_basis(x: Vec, y: Vec, z: Vec) -> Subspace:
    """span{[x,y], [y,z], [z,x]} for a basis {x, y, z} of su(2)."""
    if vectors_rank([x, y, z]) != 3:
        raise LieAlgebraError("x, y, z is not a basis of su(2)")
    g = su2()
    return Subspace([g.bracket(x, y), g.bracket(y, z), g.bracket(z, x)], 3)


def format_vec(v: Vec) -> list[str]:
    return [format_rational(a) for a in v]


def parse_vec(items: Sequence) -> Vec:
    return tuple(to_rational(str(a)) for a in items)
