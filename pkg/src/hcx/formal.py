"""Formal vectors: linear combinations of symbolic Lie algebra terms.

A term is an opaque vector symbol (``Xj``), a linear operator applied to a
term (``I(Ej)``) or a bracket of two terms (``[Xj,Yj]``).  Coefficients are
:class:`~hcx.scalarpoly.Polynomial`.  Brackets are stored antisymmetrically
normalised (``[b,a] -> -[a,b]``, ``[a,a] -> 0``) and operators and brackets
are expanded multilinearly, so two expressions are equal iff their canonical
dictionaries are equal.

Naming convention used by the parser: identifiers starting with a lowercase
letter are scalar indeterminates, identifiers starting with an uppercase
letter are vector symbols, and an uppercase identifier directly followed by
``(`` is an operator application.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterator, Mapping

from .scalarpoly import Polynomial, to_rational

Term = tuple  # ("atom", name) | ("op", name, Term) | ("br", Term, Term)


def atom(name: str) -> Term:
    return ("atom", name)


def term_text(t: Term) -> str:
    kind = t[0]
    if kind == "atom":
        return t[1]
    if kind == "op":
        return f"{t[1]}({term_text(t[2])})"
    return f"[{term_text(t[1])},{term_text(t[2])}]"


def term_depth(t: Term) -> int:
    if t[0] == "atom":
        return 0
    if t[0] == "op":
        return term_depth(t[2])
    return 1 + max(term_depth(t[1]), term_depth(t[2]))


def _order(t: Term) -> str:
    return term_text(t)


class Expr:
    """Canonical linear combination.  Key ``None`` holds the scalar part."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping | None = None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                v = Polynomial.coerce(v)
                if not v.is_zero():
                    c[k] = c[k] + v if k in c else v
                    if c[k].is_zero():
                        del c[k]
        self._c = c

    # -- constructors ---------------------------------------------------------
    @classmethod
    def scalar(cls, p) -> "Expr":
        return cls({None: Polynomial.coerce(p)})

    @classmethod
    def term(cls, t: Term, coeff=1) -> "Expr":
        if t[0] == "br":
            return bracket(cls.term(t[1]), cls.term(t[2])) * Polynomial.coerce(coeff)
        if t[0] == "op":
            return apply_op(t[1], cls.term(t[2])) * Polynomial.coerce(coeff)
        return cls({t: coeff})

    @classmethod
    def atom(cls, name: str) -> "Expr":
        return cls({atom(name): 1})

    # -- inspection -------------------------------------------------------------
    def items(self) -> list[tuple]:
        vec = sorted(((k, v) for k, v in self._c.items() if k is not None), key=lambda kv: _order(kv[0]))
        if None in self._c:
            vec.append((None, self._c[None]))
        return vec

    def coeff(self, t: Term | None) -> Polynomial:
        return self._c.get(t, Polynomial())

    def terms(self) -> list[Term]:
        return [k for k, _ in self.items() if k is not None]

    def is_zero(self) -> bool:
        return not self._c

    def is_scalar(self) -> bool:
        return all(k is None for k in self._c)

    def is_vector(self) -> bool:
        return None not in self._c

    def as_scalar(self) -> Polynomial:
        if not self.is_scalar():
            raise ValueError(f"{self} is not a scalar expression")
        return self._c.get(None, Polynomial())

    def variables(self) -> set[str]:
        return {v for p in self._c.values() for v in p.variables()}

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other: "Expr") -> "Expr":
        other = _coerce(other)
        out = dict(self._c)
        for k, v in other._c.items():
            s = out[k] + v if k in out else v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return _raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return _raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other) -> "Expr":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Expr":
        return _coerce(other) - self

    def __mul__(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.is_scalar():
                other = other.as_scalar()
            elif self.is_scalar():
                return other * self.as_scalar()
            else:
                raise ValueError("product of two vector expressions")
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.is_zero():
            return Expr()
        return _raw({k: v * other for k, v in self._c.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = Expr.scalar(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def equal_up_to_scale(self, other: "Expr") -> Fraction | None:
        """c with self == c*other, c a nonzero rational constant, else None."""
        if self.is_zero() or other.is_zero():
            return Fraction(1) if self.is_zero() and other.is_zero() else None
        if self._c.keys() != other._c.keys():
            return None
        k = next(iter(self._c))
        c = self._c[k].equal_up_to_scale(other._c[k])
        if c is None:
            return None
        return c if self == other * c else None

    def map_coefficients(self, f) -> "Expr":
        return Expr({k: f(v) for k, v in self._c.items()})

    def substitute_vars(self, bindings: Mapping[str, Polynomial]) -> "Expr":
        return self.map_coefficients(lambda p: p.substitute(bindings))

    def rename_vars(self, mapping: Mapping[str, str]) -> "Expr":
        return self.map_coefficients(lambda p: p.rename(mapping))

    def __str__(self) -> str:
        if not self._c:
            return "0"
        chunks = []
        for k, v in self.items():
            if k is None:
                s = str(v)
                neg = s.startswith("-")
                chunks.append((neg, s[1:] if neg else s))
                continue
            name = term_text(k)
            if len(v) == 1:
                (mono, c), = v.items()
                neg = c < 0
                body = str(Polynomial._raw({mono: abs(c)}))
                chunks.append((neg, name if body == "1" else f"{body}*{name}"))
            else:
                chunks.append((False, f"({v})*{name}"))
        out = []
        for i, (neg, body) in enumerate(chunks):
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"


def _raw(c: dict) -> Expr:
    e = Expr.__new__(Expr)
    e._c = c
    return e


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Expr.scalar(x)


# ---------------------------------------------------------------------------
# multilinear operations


def bracket(x: Expr, y: Expr) -> Expr:
    """Bilinear, antisymmetric formal bracket of two vector expressions."""
    if not (x.is_vector() and y.is_vector()):
        raise ValueError("bracket of a scalar expression")
    out: dict = {}
    for t1, c1 in x.items():
        for t2, c2 in y.items():
            a, b = _order(t1), _order(t2)
            if a == b:
                continue
            if a < b:
                key, sign = ("br", t1, t2), 1
            else:
                key, sign = ("br", t2, t1), -1
            s = c1 * c2 * sign
            out[key] = out[key] + s if key in out else s
            if out[key].is_zero():
                del out[key]
    return _raw(out)


def apply_op(op: str, x: Expr) -> Expr:
    """Linear operator applied to a vector expression (scalars commute)."""
    if not x.is_vector():
        raise ValueError(f"operator {op} applied to a scalar expression")
    return _raw({("op", op, t): c for t, c in x.items()})


def substitute_term(x: Expr, pattern: Term, replacement: Expr) -> Expr:
    """Replace every occurrence of ``pattern`` (also nested inside operator
    applications and brackets) by ``replacement``, expanding linearly."""
    out = Expr()
    for t, c in x.items():
        if t is None:
            out = out + Expr.scalar(c)
        else:
            out = out + _subst_in_term(t, pattern, replacement) * c
    return out


def _subst_in_term(t: Term, pattern: Term, replacement: Expr) -> Expr:
    if t == pattern:
        return replacement
    if t[0] == "atom":
        return Expr({t: 1})
    if t[0] == "op":
        inner = _subst_in_term(t[2], pattern, replacement)
        return apply_op(t[1], inner)
    return bracket(_subst_in_term(t[1], pattern, replacement), _subst_in_term(t[2], pattern, replacement))


def contains_term(x: Expr, pattern: Term) -> bool:
    return any(_contains(t, pattern) for t in x.terms())


def _contains(t: Term, pattern: Term) -> bool:
    if t == pattern:
        return True
    if t[0] == "op":
        return _contains(t[2], pattern)
    if t[0] == "br":
        return _contains(t[1], pattern) or _contains(t[2], pattern)
    return False


def jacobi_sum(x: Term, y: Term, z: Term) -> Expr:
    """[x,[y,z]] + [y,[z,x]] + [z,[x,y]] in canonical form."""
    X, Y, Z = Expr.term(x), Expr.term(y), Expr.term(z)
    return bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(!=|[-+*/^()\[\],=]))")


def tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at {pos} in {text!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> str | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected or 'token'} at token {self.i} in {self.text!r}, got {tok!r}")
        self.i += 1
        return tok

    def done(self) -> None:
        if self.peek() is not None:
            raise ValueError(f"trailing input {self.peek()!r} in {self.text!r}")

    def expr(self) -> Expr:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        acc = self.product() * sign
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.product()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def product(self) -> Expr:
        acc = self.power()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.power()
            if op == "*":
                acc = acc * rhs
            else:
                den = rhs.as_scalar().constant_value()
                if den == 0:
                    raise ZeroDivisionError(f"division by zero in {self.text!r}")
                acc = acc * (1 / den)
        return acc

    def power(self) -> Expr:
        base = self.primary()
        if self.peek() == "^":
            self.take()
            n = int(self.take())
            base = Expr.scalar(base.as_scalar() ** n)
        return base

    def primary(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise ValueError(f"unexpected end of {self.text!r}")
        if tok.isdigit():
            self.take()
            return Expr.scalar(to_rational(int(tok)))
        if tok == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if tok == "[":
            self.take()
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take("]")
            return bracket(a, b)
        if tok in ("+", "-"):
            self.take()
            e = self.primary()
            return -e if tok == "-" else e
        if re.match(r"[A-Za-z_]", tok):
            self.take()
            if tok[0].isupper():
                if self.peek() == "(":
                    self.take()
                    inner = self.expr()
                    self.take(")")
                    return apply_op(tok, inner)
                return Expr.atom(tok)
            return Expr.scalar(Polynomial.var(tok))
        raise ValueError(f"unexpected token {tok!r} in {self.text!r}")


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    p.done()
    return e


def parse_scalar(text: str) -> Polynomial:
    return parse_expr(text).as_scalar()


def parse_term(text: str) -> Term:
    """Parse a single term such as ``[K(Ej),Ek]`` (coefficient must be 1)."""
    e = parse_expr(text)
    items = e.items()
    if len(items) != 1 or items[0][0] is None or items[0][1] != 1:
        raise ValueError(f"{text!r} is not a single canonical term")
    return items[0][0]


def iter_atoms(t: Term) -> Iterator[str]:
    if t[0] == "atom":
        yield t[1]
    elif t[0] == "op":
        yield from iter_atoms(t[2])
    else:
        yield from iter_atoms(t[1])
        yield from iter_atoms(t[2])
