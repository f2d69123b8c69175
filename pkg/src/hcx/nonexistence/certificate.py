"""Line-oriented proof certificates and the replay checker.

A certificate is plain text::

    hcx-certificate 1
    section <title>
    given <NAME> <rule> [<params>] -> <fact> ; <justification>
    <index> <kind> <inputs> -> <fact> ; <justification>
    split <p1>, <p2>, ... ; <justification>
    case <NAME> ; <justification>
    ...
    end <NAME>
    QED <kind>

Facts are ``<expr> = 0``, ``<expr> != 0``, ``basis <t1>, <t2>, ...`` or
``contradiction``.  Inputs refer to earlier steps as ``#n`` and to premises as
``$NAME``.  The checker knows only the five step kinds below plus the
premise rules; it recomputes every output from its inputs.

``split p1, ..., pn`` opens n+1 cases: case i assumes ``p_i = 0`` and the
last case assumes every ``p_i != 0``.  A split closes its enclosing scope once
every case ends in a contradiction.

Step kinds and their input syntax:

linear-combine
    ``(c)*REF + (c)*[TERM, REF] + (c)*[REF, TERM] ...`` optionally followed by
    ``@ TERM in REF`` which reads off one coefficient of a combination of
    terms that a ``basis`` fact declares independent.
jacobi
    like linear-combine, with items ``(c)*Jac[T1, T2, T3]`` allowed.
substitute
    ``REF / REF:TARGET [!REF] / ...`` solves each binding fact for TARGET
    (a scalar variable or a vector term) and substitutes it.  A non-constant
    leading coefficient must be backed by a nonzero fact and is cleared by
    multiplying through.
sum-of-squares-contradiction
    ``REF = w*(p)^2 + ... + c`` with w > 0 and c > 0, matched up to a constant.
zero-vs-nonzero-contradiction
    ``REF / REF[^e], ...``: an equation that is a constant multiple of a
    product of nonzero facts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..formal import (
    Expr, apply_op, bracket, contains_term, jacobi_sum, parse_expr, substitute_term, term_text,
)
from ..scalarpoly import Polynomial, parse_rational

HEADER = "hcx-certificate 1"
STEP_KINDS = (
    "substitute",
    "linear-combine",
    "jacobi",
    "sum-of-squares-contradiction",
    "zero-vs-nonzero-contradiction",
)
CONTRADICTION_KINDS = STEP_KINDS[3:]
PREMISE_RULES = ("system", "hypothesis", "basis", "nijenhuis")


class CertificateError(ValueError):
    """Malformed certificate text."""


class ReplayError(Exception):
    def __init__(self, index: int, message: str):
        super().__init__(f"step {index}: {message}")
        self.index = index
        self.message = message


# ---------------------------------------------------------------------------
# facts


@dataclass(frozen=True)
class Fact:
    kind: str  # "eq" | "nonzero" | "basis" | "contradiction"
    expr: Expr | None = None
    terms: tuple = ()

    @classmethod
    def eq(cls, e) -> "Fact":
        return cls("eq", _as_expr(e))

    @classmethod
    def nonzero(cls, e) -> "Fact":
        return cls("nonzero", _as_expr(e))

    @classmethod
    def basis(cls, terms) -> "Fact":
        return cls("basis", None, tuple(terms))

    @classmethod
    def contradiction(cls) -> "Fact":
        return cls("contradiction")

    def __str__(self) -> str:
        if self.kind == "eq":
            return f"{self.expr} = 0"
        if self.kind == "nonzero":
            return f"{self.expr} != 0"
        if self.kind == "basis":
            return "basis " + ", ".join(term_text(t) for t in self.terms)
        return "contradiction"

    @classmethod
    def parse(cls, text: str) -> "Fact":
        text = text.strip()
        if text == "contradiction":
            return cls.contradiction()
        if text.startswith("basis "):
            terms = []
            for part in split_top(text[6:], ","):
                items = parse_expr(part).items()
                if len(items) != 1 or items[0][0] is None:
                    raise CertificateError(f"not a term: {part!r}")
                terms.append(items[0][0])
            return cls.basis(terms)
        if text.endswith(" != 0"):
            return cls.nonzero(parse_expr(text[:-5]))
        if text.endswith(" = 0"):
            return cls.eq(parse_expr(text[:-4]))
        raise CertificateError(f"cannot parse fact {text!r}")


def _as_expr(e) -> Expr:
    if isinstance(e, Expr):
        return e
    return Expr.scalar(Polynomial.coerce(e))


def split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside any (), [] nesting; pieces are stripped."""
    out, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            out.append(text[start:i].strip())
            i += len(sep)
            start = i
            continue
        i += 1
    out.append(text[start:].strip())
    return out


# ---------------------------------------------------------------------------
# lines


@dataclass(frozen=True)
class Section:
    title: str

    def __str__(self) -> str:
        return f"section {self.title}"


@dataclass(frozen=True)
class Premise:
    name: str
    rule: str
    fact: Fact
    justification: str
    params: str = ""

    def __str__(self) -> str:
        rule = f"{self.rule} {self.params}" if self.params else self.rule
        return f"given {self.name} {rule} -> {self.fact} ; {self.justification}"


@dataclass(frozen=True)
class Step:
    index: int
    kind: str
    inputs: str
    output: Fact
    justification: str

    def __str__(self) -> str:
        return f"{self.index} {self.kind} {self.inputs} -> {self.output} ; {self.justification}"


@dataclass(frozen=True)
class Split:
    polys: tuple  # Polynomials
    justification: str

    def __str__(self) -> str:
        return "split " + ", ".join(str(p) for p in self.polys) + f" ; {self.justification}"


@dataclass(frozen=True)
class Case:
    name: str
    justification: str

    def __str__(self) -> str:
        return f"case {self.name} ; {self.justification}"


@dataclass(frozen=True)
class End:
    name: str

    def __str__(self) -> str:
        return f"end {self.name}"


@dataclass(frozen=True)
class Qed:
    kind: str

    def __str__(self) -> str:
        return f"QED {self.kind}"


@dataclass
class Certificate:
    lines: list = field(default_factory=list)

    @property
    def steps(self) -> list[Step]:
        return [ln for ln in self.lines if isinstance(ln, Step)]

    @property
    def premises(self) -> list[Premise]:
        return [ln for ln in self.lines if isinstance(ln, Premise)]

    def to_text(self) -> str:
        return HEADER + "\n" + "".join(f"{ln}\n" for ln in self.lines)

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        rows = [r for r in text.splitlines() if r.strip()]
        if not rows or rows[0].strip() != HEADER:
            raise CertificateError("missing certificate header")
        return cls([parse_line(r) for r in rows[1:]])

    def without_step(self, index: int) -> "Certificate":
        return Certificate([ln for ln in self.lines if not (isinstance(ln, Step) and ln.index == index)])


_STEP_RE = re.compile(r"^(\d+) (\S+) (.*)$")


def _split_arrow(rest: str) -> tuple[str, str, str]:
    if " -> " not in rest:
        raise CertificateError(f"missing '->' in {rest!r}")
    left, right = rest.split(" -> ", 1)
    fact, _, just = right.partition(" ; ")
    return left.strip(), fact.strip(), just.strip()


def parse_line(row: str):
    row = row.strip()
    head, _, rest = row.partition(" ")
    if head == "section":
        return Section(rest)
    if head == "given":
        left, fact, just = _split_arrow(rest)
        parts = left.split(" ", 2)
        if len(parts) < 2 or parts[1] not in PREMISE_RULES:
            raise CertificateError(f"bad premise line {row!r}")
        params = parts[2] if len(parts) > 2 else ""
        return Premise(parts[0], parts[1], Fact.parse(fact), just, params)
    if head == "split":
        body, _, just = rest.partition(" ; ")
        polys = tuple(parse_expr(p).as_scalar() for p in split_top(body, ","))
        return Split(polys, just.strip())
    if head == "case":
        name, _, just = rest.partition(" ; ")
        return Case(name.strip(), just.strip())
    if head == "end":
        return End(rest.strip())
    if head == "QED":
        return Qed(rest.strip())
    m = _STEP_RE.match(row)
    if not m:
        raise CertificateError(f"unrecognised line {row!r}")
    kind = m.group(2)
    if kind not in STEP_KINDS:
        raise CertificateError(f"unknown step kind {kind!r}")
    left, fact, just = _split_arrow(row[len(m.group(1)) + len(kind) + 2:])
    return Step(int(m.group(1)), kind, left, Fact.parse(fact), just)


# ---------------------------------------------------------------------------
# step semantics


class _Fail(Exception):
    pass


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise _Fail(msg)


def _parse_multiplier(item: str) -> tuple[Polynomial, str]:
    _need(item.startswith("("), f"item {item!r} lacks a (multiplier)")
    depth = 0
    for i, ch in enumerate(item):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0:
            break
    _need(item[i + 1:i + 2] == "*", f"item {item!r} lacks '*'")
    return parse_expr(item[1:i]).as_scalar(), item[i + 2:].strip()


def _is_ref(s: str) -> bool:
    return s.startswith("#") or s.startswith("$")


def _vector_term(text: str) -> Expr:
    e = parse_expr(text)
    _need(e.is_vector(), f"{text!r} is not a vector expression")
    return e


def _combination(body: str, lookup, allow_jacobi: bool) -> tuple[Expr, int]:
    total, jac = Expr(), 0
    for item in split_top(body, " + "):
        c, target = _parse_multiplier(item)
        if target.startswith("Jac["):
            _need(allow_jacobi, "Jacobi items need a jacobi step")
            _need(target.endswith("]"), f"bad Jacobi item {item!r}")
            parts = split_top(target[4:-1], ",")
            _need(len(parts) == 3, "Jacobi item needs three terms")
            ts = []
            for p in parts:
                items = _vector_term(p).items()
                _need(len(items) == 1 and items[0][1] == 1, f"{p!r} is not a single term")
                ts.append(items[0][0])
            total = total + jacobi_sum(*ts) * c
            jac += 1
        elif target.startswith("["):
            _need(target.endswith("]"), f"bad bracket item {item!r}")
            parts = split_top(target[1:-1], ",")
            _need(len(parts) == 2, "bracket item needs two entries")
            a, b = parts
            if _is_ref(a) and not _is_ref(b):
                left, right = _eq_of(lookup(a)), _vector_term(b)
            elif _is_ref(b) and not _is_ref(a):
                left, right = _vector_term(a), _eq_of(lookup(b))
            else:
                raise _Fail(f"bracket item {item!r} needs exactly one reference")
            total = total + bracket(left, right) * c
        else:
            _need(_is_ref(target), f"bad item {item!r}")
            total = total + _eq_of(lookup(target)) * c
    return total, jac


def _eq_of(f: Fact) -> Expr:
    _need(f.kind == "eq", f"expected an equation, got {f.kind}")
    return f.expr


def _nonzero_of(f: Fact) -> Expr:
    _need(f.kind == "nonzero", f"expected a nonzero fact, got {f.kind}")
    return f.expr


def _combine_step(inputs: str, lookup, allow_jacobi: bool) -> Fact:
    body, proj = inputs, None
    if " @ " in inputs:
        body, proj = inputs.rsplit(" @ ", 1)
    total, jac = _combination(body, lookup, allow_jacobi)
    if allow_jacobi:
        _need(jac > 0, "jacobi step without a Jacobi item")
    if proj is None:
        return Fact.eq(total)
    term_s, _, basis_ref = proj.partition(" in ")
    basis = lookup(basis_ref.strip())
    _need(basis.kind == "basis", "projection needs a basis fact")
    items = _vector_term(term_s).items()
    _need(len(items) == 1, f"{term_s!r} is not a single term")
    t = items[0][0]
    _need(t in basis.terms, f"{term_text(t)} is not in the basis")
    for u in total.terms():
        _need(u is not None and u in basis.terms, "combination leaves the span of the basis")
    return Fact.eq(Expr.scalar(total.coeff(t)))


def _solve_scalar(binding: Expr, var: str):
    _need(binding.is_scalar(), "scalar binding must be a scalar equation")
    p = binding.as_scalar()
    parts = p.coefficients_in(var)
    _need(set(parts) <= {0, 1} and 1 in parts, f"binding is not linear in {var}")
    return parts[1], parts.get(0, Polynomial())


def _substitute_scalar(target: Expr, d: Polynomial, g: Polynomial, var: str, cleared: bool) -> Expr:
    """Replace var by -g/d; when ``cleared`` multiply by d^e first."""
    if not cleared:
        return target.substitute_vars({var: -g / d.constant_value()})
    e = max((c.degree(var) for _, c in target.items()), default=0)

    def clear(p: Polynomial) -> Polynomial:
        out = Polynomial()
        for k, pk in p.coefficients_in(var).items():
            out = out + pk * (-g) ** k * d ** (e - k)
        return out

    return target.map_coefficients(clear)


def _substitute_step(inputs: str, lookup) -> Fact:
    parts = [p.strip() for p in inputs.split(" / ")]
    current = _eq_of(lookup(parts[0]))
    _need(len(parts) > 1, "substitute without bindings")
    for spec in parts[1:]:
        spec, _, nz = spec.partition(" !")
        ref, sep, target = spec.partition(":")
        _need(bool(sep), f"binding {spec!r} lacks ':'")
        binding = _eq_of(lookup(ref.strip()))
        target = target.strip()
        if re.fullmatch(r"[a-z][A-Za-z0-9_]*", target):
            d, g = _solve_scalar(binding, target)
            if d.is_constant():
                current = _substitute_scalar(current, d, g, target, cleared=False)
            else:
                _need(bool(nz), f"leading coefficient {d} needs a nonzero fact")
                n = _nonzero_of(lookup(nz.strip()))
                _need(n.is_scalar() and d.equal_up_to_scale(n.as_scalar()) is not None,
                      f"nonzero fact does not cover {d}")
                current = _substitute_scalar(current, d, g, target, cleared=True)
        else:
            items = _vector_term(target).items()
            _need(len(items) == 1, f"{target!r} is not a single term")
            t = items[0][0]
            d = binding.coeff(t)
            _need(d.is_constant() and not d.is_zero(), f"{term_text(t)} must have a constant coefficient")
            rest = binding - Expr.term(t, d.constant_value())
            _need(not contains_term(rest, t), f"{term_text(t)} also occurs nested in the binding")
            replacement = rest * (Fraction(-1) / d.constant_value())
            current = substitute_term(current, t, replacement)
    return Fact.eq(current)


_SQ_RE = re.compile(r"^(\S+?)\*\((.*)\)\^2$")


def _sos_step(inputs: str, lookup) -> Fact:
    ref, sep, rhs = inputs.partition(" = ")
    _need(bool(sep), "sum of squares needs 'REF = ...'")
    p = _eq_of(lookup(ref.strip()))
    _need(p.is_scalar(), "sum of squares applies to a scalar equation")
    total, const = Polynomial(), Fraction(0)
    for item in split_top(rhs, " + "):
        m = _SQ_RE.match(item)
        if m:
            w = parse_rational(m.group(1))
            _need(w > 0, f"weight {w} is not positive")
            total = total + parse_expr(m.group(2)).as_scalar() ** 2 * w
        else:
            c = parse_rational(item)
            _need(c > 0, "constant term must be positive")
            const += c
    _need(const > 0, "a positive constant term is required")
    total = total + const
    _need(p.as_scalar().equal_up_to_scale(total) is not None, "equation is not a multiple of the stated sum of squares")
    return Fact.contradiction()


def _zero_nonzero_step(inputs: str, lookup) -> Fact:
    ref, _, rest = inputs.partition(" / ")
    e = _eq_of(lookup(ref.strip()))
    product = Expr.scalar(1)
    vectors = 0
    for item in split_top(rest, ",") if rest.strip() else []:
        r, _, exp = item.partition("^")
        n = _nonzero_of(lookup(r.strip()))
        k = int(exp) if exp else 1
        _need(k >= 1, "exponent must be positive")
        if n.is_vector():
            vectors += k
            _need(vectors <= 1, "at most one nonzero vector factor")
            product = n * product
        else:
            _need(n.is_scalar(), "mixed nonzero fact")
            product = product * n.as_scalar() ** k
    c = e.equal_up_to_scale(product)
    _need(c is not None and c != 0, "equation is not a nonzero multiple of the nonzero facts")
    return Fact.contradiction()


def compute_step(kind: str, inputs: str, lookup: Callable[[str], Fact]) -> Fact:
    """Recompute a step's output; raises ``_Fail`` on invalid inputs."""
    if kind == "linear-combine":
        return _combine_step(inputs, lookup, allow_jacobi=False)
    if kind == "jacobi":
        return _combine_step(inputs, lookup, allow_jacobi=True)
    if kind == "substitute":
        return _substitute_step(inputs, lookup)
    if kind == "sum-of-squares-contradiction":
        return _sos_step(inputs, lookup)
    if kind == "zero-vs-nonzero-contradiction":
        return _zero_nonzero_step(inputs, lookup)
    raise _Fail(f"unknown step kind {kind!r}")


def nijenhuis_expansion(params: str) -> Expr:
    """N_op(u, v) for ``params`` of the form ``Op; u, v``."""
    op, _, pair = params.partition(";")
    op = op.strip()
    _need(re.fullmatch(r"[A-Z][A-Za-z0-9_]*", op) is not None, f"bad operator {op!r}")
    uv = split_top(pair.strip(), ",")
    _need(len(uv) == 2, "nijenhuis needs two arguments")
    u, v = (_vector_term(s) for s in uv)
    Iu, Iv = apply_op(op, u), apply_op(op, v)
    return apply_op(op, bracket(Iu, v)) + apply_op(op, bracket(u, Iv)) + bracket(u, v) - bracket(Iu, Iv)


# ---------------------------------------------------------------------------
# replay


@dataclass
class _Frame:
    kind: str  # "section" | "split" | "case"
    name: str = ""
    closed: bool = False
    split: Split | None = None
    cases_done: int = 0
    open_case: bool = False
    hyps: list = field(default_factory=list)
    started: bool = False
    facts: dict = field(default_factory=dict)


@dataclass
class ReplayResult:
    steps: int
    last_kind: str | None
    complete: bool


def replay(cert: Certificate, *, system=None, require_contradiction: bool = True) -> ReplayResult:
    """Check every line of ``cert``; raise :class:`ReplayError` on failure.

    ``system`` (a ConstraintSystem) makes ``system`` premises be compared
    with the generated equation of the same label.
    """
    stack: list[_Frame] = []
    expected = 0
    last_kind = None
    done = False

    def fail(msg: str):
        raise ReplayError(expected, msg)

    def lookup(ref: str) -> Fact:
        for fr in reversed(stack):
            if ref in fr.facts:
                return fr.facts[ref]
        raise _Fail(f"unknown reference {ref}")

    def scope() -> _Frame:
        for fr in reversed(stack):
            if fr.kind != "split":
                return fr
        fail("no open section")

    def close_section() -> None:
        if not stack:
            return
        if len(stack) > 1:
            fail("section ends inside an open split")
        if require_contradiction and not stack[0].closed:
            fail(f"section {stack[0].name!r} does not end in a contradiction")
        stack.clear()

    for ln in cert.lines:
        if done:
            fail("lines after QED")
        if isinstance(ln, Section):
            close_section()
            stack.append(_Frame("section", ln.title))
        elif isinstance(ln, Premise):
            fr = scope()
            if fr.closed:
                fail("premise after the scope was closed")
            ref = "$" + ln.name
            try:
                lookup(ref)
                fail(f"premise {ln.name} defined twice")
            except _Fail:
                pass
            try:
                _check_premise(ln, system)
            except _Fail as exc:
                fail(f"premise {ln.name}: {exc}")
            if fr.kind == "case":
                if fr.started or ln.rule != "hypothesis":
                    fail("a case may only open with hypothesis premises")
                fr.hyps.append(ln.fact)
            fr.facts[ref] = ln.fact
        elif isinstance(ln, Step):
            if ln.index != expected:
                fail(f"expected step {expected}, found {ln.index}")
            fr = scope()
            if fr.closed:
                fail("step after the scope was already closed")
            fr.started = True
            try:
                got = compute_step(ln.kind, ln.inputs, lookup)
            except _Fail as exc:
                fail(str(exc))
            except (ValueError, ZeroDivisionError, KeyError) as exc:
                fail(f"malformed inputs: {exc}")
            if got.kind == "contradiction":
                if ln.kind not in CONTRADICTION_KINDS or ln.output.kind != "contradiction":
                    fail("contradiction must be stated by a contradiction step")
                fr.closed = True
            elif got != ln.output:
                fail(f"recomputed output {got} differs from stated {ln.output}")
            fr.facts[f"#{ln.index}"] = got
            last_kind = ln.kind
            expected += 1
        elif isinstance(ln, Split):
            fr = scope()
            if fr.closed:
                fail("split after the scope was closed")
            if not ln.polys:
                fail("empty split")
            fr.started = True
            stack.append(_Frame("split", split=ln))
        elif isinstance(ln, Case):
            if not stack or stack[-1].kind != "split" or stack[-1].open_case:
                fail(f"case {ln.name} outside a split")
            if stack[-1].cases_done > len(stack[-1].split.polys):
                fail("too many cases")
            stack[-1].open_case = True
            stack.append(_Frame("case", ln.name))
        elif isinstance(ln, End):
            if not stack or stack[-1].kind != "case" or stack[-1].name != ln.name:
                fail(f"unmatched end {ln.name}")
            case = stack.pop()
            sp = stack[-1]
            if not case.closed:
                fail(f"case {case.name} does not end in a contradiction")
            want = _case_hypotheses(sp.split, sp.cases_done)
            if sorted(map(str, case.hyps)) != sorted(map(str, want)):
                fail(f"case {case.name} does not assume {', '.join(map(str, want))}")
            sp.cases_done += 1
            sp.open_case = False
            if sp.cases_done == len(sp.split.polys) + 1:
                stack.pop()
                scope().closed = True
        elif isinstance(ln, Qed):
            close_section()
            if ln.kind != last_kind:
                fail(f"QED {ln.kind} does not match the final step kind {last_kind}")
            done = True
        else:
            fail(f"unknown line {ln!r}")
    if require_contradiction and not done:
        fail("certificate does not end with QED")
    if not require_contradiction:
        if len(stack) > 1:
            fail("certificate ends inside an open split")
    return ReplayResult(expected, last_kind, done)


def _case_hypotheses(sp: Split, i: int) -> list[Fact]:
    if i < len(sp.polys):
        return [Fact.eq(sp.polys[i])]
    return [Fact.nonzero(p) for p in sp.polys]


def _check_premise(p: Premise, system) -> None:
    if p.rule == "basis":
        _need(p.fact.kind == "basis" and len(p.fact.terms) == len(set(p.fact.terms)), "basis premise needs distinct terms")
    elif p.rule == "nijenhuis":
        _need(p.fact.kind == "eq", "nijenhuis premise must be an equation")
        _need(nijenhuis_expansion(p.params) == p.fact.expr, "stated expansion differs from the definition")
    elif p.rule == "system":
        _need(p.fact.kind == "eq", "system premise must be an equation")
        if system is not None:
            try:
                expected = system.lookup(p.name)
            except KeyError:
                raise _Fail(f"no generated equation labelled {p.name}") from None
            _need(expected == p.fact.expr, "differs from the generated equation")
    else:
        _need(p.fact.kind in ("eq", "nonzero"), "hypothesis must be an equation or a nonzero fact")
