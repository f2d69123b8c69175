"""Exact scalars, dense matrices over Q and sparse multivariate polynomials.

Rationals are :class:`fractions.Fraction`; this module only adds the
canonical text form and coercion helpers around it.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]

__all__ = [
    "Rational",
    "to_rational",
    "format_rational",
    "parse_rational",
    "rational_arith",
    "Polynomial",
    "Matrix",
    "var_key",
    "rank",
]


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


def format_rational(q: Fraction) -> str:
    """Canonical text: ``"3"``, ``"-1/2"``."""
    return str(Fraction(q))


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
        raise ValueError(f"not a rational literal: {s!r}")
    return Fraction(s)


def rational_arith(a: Number, b: Number, op: str) -> Fraction:
    a, b = to_rational(a), to_rational(b)
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        if b == 0:
            raise ZeroDivisionError(f"division of {a} by zero")
        return a / b
    raise ValueError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# variable order

_COEFF_VAR = re.compile(r"^([abc])([123])(\w*)$")


def var_key(name: str) -> tuple:
    """Global variable order: block coefficients a1*, a2*, ..., c3* first
    (by letter, row, factor suffix), then everything else by name."""
    m = _COEFF_VAR.match(name)
    if m:
        letter, row, suffix = m.groups()
        return (0, "abc".index(letter), int(row), _suffix_key(suffix))
    return (1, name)


def _suffix_key(s: str) -> tuple:
    # numeric factor indices sort numerically and before symbolic ones
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


_SENTINEL = ((2,), 0)


def _monomial_key(mono: tuple) -> tuple:
    # ascending sort of this key == descending lex order of monomials
    return tuple((var_key(v), -e) for v, e in mono) + (_SENTINEL,)


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda ve: var_key(ve[0])))


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable polynomial over Q.

    ``terms`` maps a monomial -- a tuple of ``(variable, exponent)`` pairs in
    global variable order -- to a nonzero Fraction.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, Number] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = to_rational(c)
                if c != 0:
                    mono = tuple(sorted(((v, e) for v, e in mono if e), key=lambda ve: var_key(ve[0])))
                    clean[mono] = clean.get(mono, Fraction(0)) + c
                    if clean[mono] == 0:
                        del clean[mono]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls._raw({((name, 1),): Fraction(1)})

    @classmethod
    def const(cls, c: Number) -> "Polynomial":
        c = to_rational(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def coerce(cls, x) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        return cls.const(x)

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        from .formal import parse_scalar

        return parse_scalar(text)

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda t: _monomial_key(t[0]))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((), Fraction(0))

    def variables(self) -> list[str]:
        vs = {v for mono in self._terms for v, _ in mono}
        return sorted(vs, key=var_key)

    def degree(self, var: str | None = None) -> int:
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e for _, e in mono) for mono in self._terms)
        return max(dict(mono).get(var, 0) for mono in self._terms)

    def leading(self) -> tuple[tuple, Fraction]:
        return self.items()[0]

    def coefficients_in(self, var: str) -> dict[int, "Polynomial"]:
        """Write self as sum_k coeff_k * var**k; returns {k: coeff_k}."""
        out: dict[int, dict] = {}
        for mono, c in self._terms.items():
            d = dict(mono)
            k = d.pop(var, 0)
            rest = tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))
            out.setdefault(k, {})[rest] = c
        return {k: Polynomial._raw(t) for k, t in out.items()}

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        other = Polynomial.coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return Polynomial.coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = to_rational(other)
            if other == 0:
                return Polynomial()
            return Polynomial._raw({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        # only exact division by a nonzero rational constant
        if isinstance(other, Polynomial):
            other = other.constant_value()
        other = to_rational(other)
        if other == 0:
            raise ZeroDivisionError("polynomial divided by zero")
        return self * (1 / other)

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def equal_up_to_scale(self, other: "Polynomial") -> Fraction | None:
        """Return c with self == c*other (c != 0), or None."""
        if self.is_zero() or other.is_zero():
            return Fraction(1) if self.is_zero() and other.is_zero() else None
        if self._terms.keys() != other._terms.keys():
            return None
        mono = next(iter(self._terms))
        c = self._terms[mono] / other._terms[mono]
        return c if self == other * c else None

    # -- evaluation / substitution ---------------------------------------
    def evaluate(self, assignment: Mapping[str, Number]):
        """Exact value at a point; every variable of self must be assigned."""
        missing = [v for v in self.variables() if v not in assignment]
        if missing:
            raise KeyError(f"no value for variable {missing[0]!r}")
        total = Fraction(0)
        for mono, c in self._terms.items():
            t = c
            for v, e in mono:
                t = t * to_rational(assignment[v]) ** e
            total += t
        return total

    def substitute(self, bindings: Mapping[str, "Polynomial | Number"]) -> "Polynomial":
        """Simultaneously replace variables by polynomials and expand."""
        if not bindings:
            return self
        binds = {v: Polynomial.coerce(p) for v, p in bindings.items()}
        powers: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in powers:
                powers[key] = binds[v] ** e
            return powers[key]

        out = Polynomial()
        for mono, c in self._terms.items():
            kept = []
            term = Polynomial.const(c)
            for v, e in mono:
                if v in binds:
                    term = term * power(v, e)
                else:
                    kept.append((v, e))
            if kept:
                term = term * Polynomial._raw({tuple(kept): Fraction(1)})
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        return Polynomial({tuple((mapping.get(v, v), e) for v, e in mono): c for mono, c in self._terms.items()})

    def diff(self, var: str) -> "Polynomial":
        out = {}
        for mono, c in self._terms.items():
            d = dict(mono)
            e = d.get(var, 0)
            if not e:
                continue
            if e == 1:
                del d[var]
            else:
                d[var] = e - 1
            out[tuple(d.items())] = c * e
        return Polynomial(out)

    # -- text ---------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (mono, c) in enumerate(self.items()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not body:
                text = format_rational(a)
            elif a == 1:
                text = body
            else:
                text = f"{format_rational(a)}*{body}"
            if i == 0:
                parts.append(("-" if sign == "-" else "") + text)
            else:
                parts.append(f" {sign} {text}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


def poly_eval(p: Polynomial, assignment: Mapping[str, Number]) -> Fraction:
    return p.evaluate(assignment)


def poly_substitute(p: Polynomial, bindings: Mapping[str, Polynomial | Number]) -> Polynomial:
    return p.substitute(bindings)


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense immutable matrix over Q, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(to_rational(x) for x in entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(0, 0, ())
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "Matrix":
        return cls.from_rows(cols).T

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, [0] * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c: Number) -> "Matrix":
        c = to_rational(c)
        return Matrix(self.rows, self.cols, [c * a for a in self.entries])

    def _scaled_ints(self) -> tuple[list[int], int]:
        """(integer entries, d) with self = entries / d."""
        d = math.lcm(*(x.denominator for x in self.entries)) if self.entries else 1
        return [x.numerator * (d // x.denominator) for x in self.entries], d

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        # integer products over a common denominator, normalised once per entry
        a, da = self._scaled_ints()
        b, db = other._scaled_ints()
        n, m = self.cols, other.cols
        bcols = [b[j::m] for j in range(m)]
        d = da * db
        out = []
        for i in range(self.rows):
            r = a[i * n:(i + 1) * n]
            for col in bcols:
                out.append(Fraction(sum(x * y for x, y in zip(r, col) if x and y), d))
        return Matrix(self.rows, m, out)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for a {self.shape} matrix")
        return tuple(sum((a * b for a, b in zip(self.row(i), v) if a and b), Fraction(0)) for i in range(self.rows))

    def _same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    # -- elimination -----------------------------------------------------
    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row-echelon form and pivot columns."""
        m = self.to_rows()
        pivots = []
        r = 0
        for c in range(self.cols):
            if r == self.rows:
                break
            piv = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return Matrix.from_rows(m) if m else Matrix(0, self.cols, ()), pivots

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        return len(self.rref()[1])

    def nullspace(self) -> list[tuple]:
        """Basis of {x : self x = 0}, one vector per free column."""
        red, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            x = [Fraction(0)] * self.cols
            x[f] = Fraction(1)
            for i, p in enumerate(pivots):
                x[p] = -red[i, f]
            basis.append(tuple(x))
        return basis

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        m = self.to_rows()
        n = self.rows
        d = Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                d = -d
            d *= m[c][c]
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] / m[c][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[c])]
        return d

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = Matrix.from_rows([list(self.row(i)) + [1 if i == j else 0 for j in range(n)] for i in range(n)])
        red, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Matrix.from_rows([list(red.row(i))[n:] for i in range(n)])

    def leading_minors(self) -> list[Fraction]:
        return [Matrix.from_rows([self.row(i)[:k] for i in range(k)]).det() for k in range(1, self.rows + 1)]

    def is_positive_definite(self) -> bool:
        """Sylvester's criterion, exact."""
        return self.is_symmetric() and all(d > 0 for d in self.leading_minors())

    def __repr__(self) -> str:
        return f"Matrix({[[format_rational(x) for x in r] for r in self.to_rows()]})"


def rank(m: Matrix | Sequence[Sequence]) -> int:
    if not isinstance(m, Matrix):
        m = Matrix.from_rows(m)
    return m.rank()
