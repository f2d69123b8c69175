"""Symbolic expansion of N_I(e_a, e_b) = 0 inside one su(2) factor.

Write ``I e_{1(j)} = A_j + X_j`` etc. with ``A_j = a1 e1 + a2 e2 + a3 e3`` in
factor j and ``X_j`` outside it.  A vector is handled as a pair (block part,
off-block part): the block part is three polynomial coordinates, the
off-block part a formal combination of ``X_j, Y_j, Z_j`` and their brackets.
Block and off-block vectors commute, so expanding the three Nijenhuis
equations for the pairs (e1,e2), (e2,e3), (e3,e1) and collecting coefficients
yields nine scalar and three vector equations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..formal import Expr, bracket, parse_expr
from ..scalarpoly import Polynomial

PAIRS = ((1, 2), (2, 3), (3, 1))
LETTERS = "abc"
OFF = "XYZ"


def coeff_name(letter: str, row: int, j: str | int = "j") -> str:
    return f"{letter}{row}{j}"


def coeff_names(j: str | int = "j") -> list[str]:
    return [coeff_name(L, r, j) for L in LETTERS for r in (1, 2, 3)]


@dataclass(frozen=True)
class _V:
    block: tuple  # three Polynomials
    off: Expr

    def __add__(self, o: "_V") -> "_V":
        return _V(tuple(a + b for a, b in zip(self.block, o.block)), self.off + o.off)

    def __sub__(self, o: "_V") -> "_V":
        return _V(tuple(a - b for a, b in zip(self.block, o.block)), self.off - o.off)

    def scaled(self, c: Polynomial) -> "_V":
        return _V(tuple(a * c for a in self.block), self.off * c)


def _cross(x, y):
    return (x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0])


def _br(x: _V, y: _V) -> _V:
    return _V(_cross(x.block, y.block), bracket(x.off, y.off))


def _basis(i: int) -> _V:
    return _V(tuple(Polynomial.const(int(i == r)) for r in (1, 2, 3)), Expr())


class _FormalI:
    def __init__(self, j):
        self.images = {}
        for r, (L, sym) in enumerate(zip(LETTERS, OFF), start=1):
            block = tuple(Polynomial.var(coeff_name(L, c, j)) for c in (1, 2, 3))
            self.images[r] = _V(block, Expr.atom(f"{sym}{j}"))

    def __call__(self, v: _V) -> _V:
        if not v.off.is_zero():
            raise ValueError("I is only known on the factor itself")
        out = _V((Polynomial(),) * 3, Expr())
        for r in (1, 2, 3):
            out = out + self.images[r].scaled(v.block[r - 1])
        return out


def _nijenhuis(I: _FormalI, x: _V, y: _V) -> _V:
    return I(_br(I(x), y) + _br(x, I(y))) + _br(x, y) - _br(I(x), I(y))


@dataclass
class ConstraintSystem:
    factor: str
    scalar_equations: list = field(default_factory=list)  # [(label, Polynomial)]
    vector_equations: list = field(default_factory=list)  # [(label, Expr)]

    def __post_init__(self):
        if self.scalar_equations and (len(self.scalar_equations) != 9 or len(self.vector_equations) != 3):
            raise ValueError("a factor's system has 9 scalar and 3 vector equations")

    def all_equations(self) -> list[tuple[str, Expr]]:
        out = []
        for a, b in PAIRS:
            for label, p in self.scalar_equations:
                if label.startswith(f"E{a}{b}_"):
                    out.append((label, Expr.scalar(p)))
            for label, e in self.vector_equations:
                if label.startswith(f"E{a}{b}_"):
                    out.append((label, e))
        return out

    def lookup(self, label: str) -> Expr:
        return dict(self.all_equations())[label]

    def to_text(self) -> str:
        return "".join(f"{label}: {e} = 0\n" for label, e in self.all_equations())


def symbolic_system(j: str | int = "j") -> ConstraintSystem:
    """Collect the coefficients of N_I(e_a, e_b) for (a,b) in (1,2),(2,3),(3,1).

    Labels are ``E{a}{b}_{r}`` for the coefficient of e_r and ``E{a}{b}_X``
    for the off-factor part.
    """
    I = _FormalI(j)
    scalars, vectors = [], []
    for a, b in PAIRS:
        n = _nijenhuis(I, _basis(a), _basis(b))
        for r in (1, 2, 3):
            scalars.append((f"E{a}{b}_{r}", n.block[r - 1]))
        vectors.append((f"E{a}{b}_X", n.off))
    return ConstraintSystem(str(j), scalars, vectors)


# Reference forms transcribed independently of the derivation above; they are
# comparison data only and never feed the derivation.
REFERENCE_EQUATIONS = {
    "E12_1": "a1j*c1j - a3j*a1j + b2j*c1j - b3j*b1j - a2j*b3j + a3j*b2j",
    "E12_2": "a1j*c2j - a3j*a2j + b2j*c2j - b3j*b2j - a3j*b1j + a1j*b3j",
    "E12_3": "a1j*c3j - a3j^2 + b2j*c3j - b3j^2 + 1 - a1j*b2j + a2j*b1j",
    "E12_X": "-a3j*Xj - b3j*Yj + (a1j + b2j)*Zj - [Xj,Yj]",
    "E23_1": "-b1j^2 + b2j*a1j - c1j^2 + c3j*a1j + 1 - b2j*c3j + b3j*c2j",
    "E23_2": "-b1j*b2j + b2j*a2j - c1j*c2j + c3j*a2j - b3j*c1j + b1j*c3j",
    "E23_3": "-b1j*b3j + b2j*a3j - c1j*c3j + c3j*a3j - b1j*c2j + b2j*c1j",
    "E23_X": "(b2j + c3j)*Xj - b1j*Yj - c1j*Zj - [Yj,Zj]",
    "E31_1": "-c2j*c1j + c3j*b1j + a1j*b1j - a2j*a1j - c2j*a3j + c3j*a2j",
    "E31_2": "-c2j^2 + c3j*b2j + a1j*b2j - a2j^2 + 1 - c3j*a1j + c1j*a3j",
    "E31_3": "-c2j*c3j + c3j*b3j + a1j*b3j - a2j*a3j - c1j*a2j + c2j*a1j",
    "E31_X": "-a2j*Xj + (a1j + c3j)*Yj - c2j*Zj - [Zj,Xj]",
}

# The lemma-level consequences used by the numeric infeasibility oracle.
REFERENCE_LEMMA_EQUATIONS = [
    "b1j - a2j", "c2j - b3j", "a3j - c1j",
    "a3j*b2j - a2j*b3j", "b2j*c1j - b1j*c2j",
    "a1j*c2j - a2j*c1j", "a1j*b3j - a3j*b1j",
    "b1j*c3j - b3j*c1j", "a2j*c3j - a3j*c2j",
    "b2j*c3j - b3j*c2j + 1", "a1j*b2j - a2j*b1j + 1", "a1j*c3j - a3j*c1j + 1",
]


def _with_factor(text: str, j) -> str:
    j = str(j)
    text = re.sub(r"\b([abc][123])j\b", lambda m: m.group(1) + j, text)
    return re.sub(r"\b([XYZ])j\b", lambda m: m.group(1) + j, text)


def reference_equations(j: str | int = "j") -> dict[str, Expr]:
    return {label: parse_expr(_with_factor(t, j)) for label, t in REFERENCE_EQUATIONS.items()}


def reference_lemma_polynomials(j: str | int = "j") -> list[Polynomial]:
    return [parse_expr(_with_factor(t, j)).as_scalar() for t in REFERENCE_LEMMA_EQUATIONS]


@dataclass
class Comparison:
    label: str
    generated: Expr
    reference: Expr
    sign: int | None  # +1 / -1 when matched, None otherwise

    @property
    def matched(self) -> bool:
        return self.sign is not None


def compare_with_reference(system: ConstraintSystem) -> list[Comparison]:
    ref = reference_equations(system.factor)
    out = []
    for label, e in system.all_equations():
        r = ref[label]
        if e == r:
            sign = 1
        elif e == -r:
            sign = -1
        else:
            sign = None
        out.append(Comparison(label, e, r, sign))
    return out
