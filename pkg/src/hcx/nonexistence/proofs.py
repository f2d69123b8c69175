"""Certificate generation for the non-existence argument.

The first section works inside one factor j under the hypothesis that
X_j, Y_j, Z_j are independent.  It derives the three coefficient equalities,
the six vanishing minors and the three minors equal to -1, then splits on
which of b1, c2, a3 vanish and closes each case.  The second section runs
the hypercomplex argument in two factors j, k with formal symbols.

Every step is re-checked with the replay semantics as it is emitted, so a
generator bug surfaces here rather than in a downstream replay.
"""

from __future__ import annotations

import re

from ..formal import Expr, bracket, parse_expr
from ..scalarpoly import Polynomial
from .certificate import (
    Case, Certificate, End, Fact, Premise, Qed, Section, Split, Step, _Fail, compute_step,
    nijenhuis_expansion, replay,
)
from .system import PAIRS, ConstraintSystem, symbolic_system

CASES = ("A", "A2", "A3", "B")


def _rot_name(base: str, r: int) -> str:
    """Index rotation a->b->c->a with rows 1->2->3->1, applied r times."""
    letter, row = base[0], int(base[1])
    for _ in range(r % 3):
        letter = "abc"[("abc".index(letter) + 1) % 3]
        row = row % 3 + 1
    return f"{letter}{row}"


class _Builder:
    def __init__(self, suffix: str):
        self.s = suffix
        self.lines: list = []
        self.facts: dict = {}
        self.next = 0
        self.by_poly: dict = {}

    # -- polynomial helpers --------------------------------------------------
    def P(self, text: str, r: int = 0) -> Polynomial:
        """Parse a polynomial in the bare names a1..c3, rotated r times."""
        text = re.sub(r"\b([abc][123])\b", lambda m: _rot_name(m.group(1), r) + self.s, text)
        return parse_expr(text).as_scalar()

    def R(self, text: str, r: int) -> str:
        """Rotate bare names inside justification text."""
        return re.sub(r"\b([abc][123])\b", lambda m: _rot_name(m.group(1), r), text)

    def role(self, text: str, r: int = 0) -> tuple[str, int]:
        p = self.P(text, r)
        for sign in (1, -1):
            ref = self.by_poly.get(p * sign)
            if ref is not None:
                return ref, sign
        raise KeyError(f"no derived fact {p}")

    # -- emission ----------------------------------------------------------------
    def section(self, title: str) -> None:
        self.lines.append(Section(title))

    def given(self, name: str, rule: str, fact: Fact, just: str, params: str = "") -> str:
        self.lines.append(Premise(name, rule, fact, just, params))
        ref = "$" + name
        self.facts[ref] = fact
        self._index(ref, fact)
        return ref

    def step(self, kind: str, inputs: str, output: Fact | None, just: str) -> str:
        try:
            got = compute_step(kind, inputs, self.facts.__getitem__)
        except _Fail as exc:
            raise AssertionError(f"generated step {self.next} is invalid: {exc}") from exc
        if output is None:
            output = got
        elif got != output:
            raise AssertionError(f"generated step {self.next}: expected {output}, checker computes {got}")
        ref = f"#{self.next}"
        self.lines.append(Step(self.next, kind, inputs, output, just))
        self.facts[ref] = output
        self._index(ref, output)
        self.next += 1
        return ref

    def _index(self, ref: str, fact: Fact) -> None:
        if fact.kind == "eq" and fact.expr.is_scalar():
            self.by_poly.setdefault(fact.expr.as_scalar(), ref)

    def combine(self, items) -> str:
        parts = [f"({c})*{t}" for c, t in items if not Polynomial.coerce(c).is_zero()]
        return " + ".join(parts)

    def certificate(self) -> Certificate:
        return Certificate(list(self.lines))

    @classmethod
    def resume(cls, cert: Certificate, suffix: str) -> "_Builder":
        b = cls(suffix)
        for ln in cert.lines:
            b.lines.append(ln)
            if isinstance(ln, Premise):
                b.facts["$" + ln.name] = ln.fact
                b._index("$" + ln.name, ln.fact)
            elif isinstance(ln, Step):
                b.facts[f"#{ln.index}"] = ln.output
                b._index(f"#{ln.index}", ln.output)
                b.next = ln.index + 1
        return b


def _reduce(target: Polynomial, reducers) -> tuple[list, Polynomial]:
    """Divide target by facts d*v + g (d constant) in turn.

    Returns ``([(multiplier, ref), ...], remainder)`` with
    target = sum(multiplier * fact) + remainder.
    """
    out, r = [], target
    for ref, f, var in reducers:
        parts = f.coefficients_in(var)
        d = parts[1].constant_value()
        v = Polynomial.var(var)
        q = Polynomial()
        while r.degree(var) >= 1:
            k = r.degree(var)
            m = r.coefficients_in(var)[k] * v ** (k - 1) / d
            q = q + m
            r = r - m * f
        if not q.is_zero():
            out.append((q, ref))
    return out, r


# ---------------------------------------------------------------------------
# section 1: one factor


def _system_premises(b: _Builder, system: ConstraintSystem) -> None:
    for a, c in PAIRS:
        for label, e in system.all_equations():
            if not label.startswith(f"E{a}{c}_"):
                continue
            tail = label.split("_")[1]
            just = (f"off-factor part of N_I(e{a},e{c}) = 0" if tail == "X"
                    else f"coefficient of e{tail} in N_I(e{a},e{c}) = 0")
            b.given(label, "system", Fact.eq(e), just)


def _equalities(b: _Builder, system: ConstraintSystem) -> None:
    s = b.s
    X, Y, Z = (Expr.atom(f"{n}{s}") for n in "XYZ")
    b.given("BASIS", "basis", Fact.basis([bracket(X, Y).terms()[0], bracket(Y, Z).terms()[0], bracket(X, Z).terms()[0]]),
            "X, Y, Z independent in su(2), so [X,Y], [Y,Z], [Z,X] are a basis as well")
    coeff = {"E12_X": (Z, "a1 + b2", "Z"), "E23_X": (X, "b2 + c3", "X"), "E31_X": (Y, "a1 + c3", "Y")}
    for n, (label, (sym, text, name)) in enumerate(coeff.items(), start=1):
        p = b.P(text)
        if system.lookup(label).coeff(sym.terms()[0]) != p:
            raise AssertionError(f"{label}: unexpected {name} coefficient")
        b.given(f"NZ{n}", "hypothesis", Fact.nonzero(p),
                f"coefficient of {name} in {label}; the bracket of the other two symbols is independent of them")

    steps = []
    for label, other in (("E12_X", Z), ("E23_X", X), ("E31_X", Y)):
        out = bracket(system.lookup(label), other)
        steps.append(b.step("linear-combine", f"(1)*[${label}, {other}]", Fact.eq(out),
                            "bracket the off-factor equation with the remaining symbol"))
    target = (bracket(X, Y) * b.P("b1 - a2") + bracket(Y, Z) * b.P("c2 - b3") + bracket(Z, X) * b.P("a3 - c1"))
    jac = b.step("jacobi", b.combine([(1, r) for r in steps]) + f" + (-1)*Jac[{X}, {Y}, {Z}]", Fact.eq(target),
                 "sum of the three and cancel the double brackets with the Jacobi identity")
    for t in (bracket(X, Y), bracket(Y, Z), bracket(X, Z)):
        term = t.terms()[0]
        b.step("linear-combine", f"(1)*{jac} @ {t} in $BASIS", Fact.eq(target.coeff(term)),
               "brackets of a basis are independent; read off this coefficient")


_MINORS = ["a3*b2 - a2*b3", "b2*c1 - b1*c2", "a1*c2 - a2*c1", "a1*b3 - a3*b1", "b1*c3 - b3*c1", "a2*c3 - a3*c2"]


def _bindings(b: _Builder) -> list:
    out = []
    for text, var in (("b1 - a2", "b1"), ("c2 - b3", "c2"), ("a3 - c1", "c1")):
        ref, _ = b.role(text)
        out.append((ref, b.facts[ref].expr.as_scalar(), var + b.s))
    return out


def _combine_to(b: _Builder, target: Polynomial, base: list, just: str) -> str:
    """Emit target = sum(base) + (multiples of the equalities)."""
    resid = target
    for c, ref in base:
        resid = resid - b.facts[ref].expr.as_scalar() * c
    extra, rem = _reduce(resid, _bindings(b))
    if not rem.is_zero():
        raise AssertionError(f"cannot reach {target}: remainder {rem}")
    return b.step("linear-combine", b.combine(list(base) + extra), Fact.eq(target), just)


def _find_base(b: _Builder, system: ConstraintSystem, target: Polynomial) -> list:
    subs = {f"b1{b.s}": b.P("a2"), f"c2{b.s}": b.P("b3"), f"c1{b.s}": b.P("a3")}
    red = target.substitute(subs)
    eqs = [(f"${label}", p.substitute(subs)) for label, p in system.scalar_equations]
    for ref, p in eqs:
        k = p.equal_up_to_scale(red) if not p.is_zero() else None
        if k is not None:
            return [(Polynomial.const(1 / k), ref)]
    for i, (r1, p1) in enumerate(eqs):
        for r2, p2 in eqs[i + 1:]:
            for sign in (1, -1):
                q = p1 + p2 * sign
                k = q.equal_up_to_scale(red) if not q.is_zero() else None
                if k is not None:
                    return [(Polynomial.const(1 / k), r1), (Polynomial.const(sign / k), r2)]
    raise AssertionError(f"no combination of the scalar equations gives {target}")


def _identities(b: _Builder, system: ConstraintSystem) -> None:
    for text in _MINORS:
        t = b.P(text)
        _combine_to(b, t, _find_base(b, system, t), "scalar equation after substituting the three equalities")
    rank_d = _combine_to(b, b.P("b2*c3 - b3*c2 - a1*b2 + a2*b1"), _find_base(b, system, b.P("b2*c3 - b3*c2 - a1*b2 + a2*b1")),
                         "difference of two scalar equations: two distinguished minors agree")
    rank_e = _combine_to(b, b.P("a1*c3 - a3*c1 - a1*b2 + a2*b1"), _find_base(b, system, b.P("a1*c3 - a3*c1 - a1*b2 + a2*b1")),
                         "difference of two scalar equations: two distinguished minors agree")
    d2 = _combine_to(b, b.P("a1*b2 - a2*b1 + 1"), [(1, "$E12_3"), (-1, rank_d), (-1, rank_e)],
                     "the common value of the three minors is -1")
    b.step("linear-combine", b.combine([(1, d2), (1, rank_d)]), Fact.eq(b.P("b2*c3 - b3*c2 + 1")),
           "the common value of the three minors is -1")
    b.step("linear-combine", b.combine([(1, d2), (1, rank_e)]), Fact.eq(b.P("a1*c3 - a3*c1 + 1")),
           "the common value of the three minors is -1")


def _case_a(b: _Builder, r: int, hyp: str) -> None:
    P = lambda t: b.P(t, r)  # noqa: E731
    s = b.s

    def fact(text):
        ref, sign = b.role(text, r)
        return ref, sign

    q1, _ = fact("b1 - a2")
    a2 = b.step("linear-combine", b.combine(_reduce(P("a2"), [(q1, b.facts[q1].expr.as_scalar(), _rot_name("a2", r) + s),
                                                             (hyp, P("b1"), _rot_name("b1", r) + s)])[0]),
                Fact.eq(P("a2")), b.R("one of the equalities", r))
    d2, _ = fact("a1*b2 - a2*b1 + 1")
    f1 = b.step("substitute", f"{d2} / {hyp}:{_rot_name('b1', r)}{s}", Fact.eq(P("a1*b2 + 1")),
                b.R("case hypothesis in a minor equal to -1", r))
    m4, sg4 = fact("a1*b3 - a3*b1")
    b3 = b.step("linear-combine", b.combine([(-P("b2") * sg4, m4), (P("b3"), f1), (-P("a3*b2"), hyp)]),
                Fact.eq(P("b3")), b.R("a vanishing minor against a1*b2 = -1", r))
    m1, sg1 = fact("a3*b2 - a2*b3")
    a3 = b.step("linear-combine", b.combine([(-P("a1") * sg1, m1), (P("a3"), f1), (-P("a1*b3"), a2)]),
                Fact.eq(P("a3")), b.R("a vanishing minor against a1*b2 = -1", r))
    d1, _ = fact("b2*c3 - b3*c2 + 1")
    f3 = b.step("substitute", f"{d1} / {b3}:{_rot_name('b3', r)}{s}", Fact.eq(P("b2*c3 + 1")),
                b.R("so b2*c3 = -1", r))
    d3, _ = fact("a1*c3 - a3*c1 + 1")
    f2 = b.step("substitute", f"{d3} / {a3}:{_rot_name('a3', r)}{s}", Fact.eq(P("a1*c3 + 1")),
                b.R("so a1*c3 = -1", r))
    sq = b.step("linear-combine", b.combine([(P("a1^2"), f3), (-P("a1*c3"), f1), (1, f2)]),
                Fact.eq(P("a1^2 + 1")), b.R("b2 = c3 = -1/a1 would give b2*c3 = 1/a1^2 > 0", r))
    b.step("sum-of-squares-contradiction", f"{sq} = 1*({P('a1')})^2 + 1", Fact.contradiction(),
           "a real square plus one cannot vanish")


def _case_b(b: _Builder, hyps: list) -> None:
    s = b.s
    q1, _ = b.role("b1 - a2")
    q2, _ = b.role("c2 - b3")
    m4, _ = b.role("a1*b3 - a3*b1")
    m1, _ = b.role("a3*b2 - a2*b3")
    d2, _ = b.role("a1*b2 - a2*b1 + 1")
    just = "substitute the equalities"
    x = b.step("substitute", f"{m4} / {q2}:b3{s}", Fact.eq(b.P("a1*c2 - a3*b1")), just)
    y = b.step("substitute", f"{m1} / {q1}:a2{s} / {q2}:b3{s}", Fact.eq(b.P("a3*b2 - b1*c2")), just)
    z = b.step("substitute", f"{d2} / {q1}:a2{s}", Fact.eq(b.P("a1*b2 - b1^2 + 1")), just)
    hb1, hb2, hb3 = hyps
    w = b.step("substitute", f"{z} / {x}:a1{s} !{hb2}", None, "a1 = a3*b1/c2, clearing the denominator c2")
    v = b.step("substitute", f"{w} / {y}:b2{s} !{hb3}", Fact.eq(b.P("a3*c2")),
               "b2 = b1*c2/a3 makes a1*b2 - b1^2 vanish, so 0 = -1 after clearing a3*c2")
    b.step("zero-vs-nonzero-contradiction", f"{v} / {hb3}, {hb2}", Fact.contradiction(),
           "a3*c2 is nonzero in this case")


_CASE_ROT = {"A": 0, "A2": 1, "A3": 2}


def _case_hyp_facts(b: _Builder, case: str) -> list:
    split = [b.P("b1"), b.P("c2"), b.P("a3")]
    if case in _CASE_ROT:
        return [Fact.eq(split[_CASE_ROT[case]])]
    return [Fact.nonzero(p) for p in split]


def _run_case(b: _Builder, case: str, hyp_refs: list) -> None:
    if case in _CASE_ROT:
        _case_a(b, _CASE_ROT[case], hyp_refs[0])
    else:
        _case_b(b, hyp_refs)


def _case_just(case: str) -> str:
    return {"A": "b1 = 0, hence b1 = a2 = 0",
            "A2": "c2 = 0, hence c2 = b3 = 0",
            "A3": "a3 = 0, hence a3 = c1 = 0",
            "B": "b1, c2, a3 all nonzero"}[case]


def _open_factor(system: ConstraintSystem) -> _Builder:
    b = _Builder(system.factor)
    b.section(f"factor {system.factor}: X, Y, Z independent is impossible")
    _system_premises(b, system)
    return b


def _hyp_names(case: str) -> list[str]:
    return ["H" + case] if case in _CASE_ROT else ["HB1", "HB2", "HB3"]


def _case_split(b: _Builder) -> None:
    polys = (b.P("b1"), b.P("c2"), b.P("a3"))
    b.lines.append(Split(polys, "which of the three equal pairs vanish"))
    for case in CASES:
        b.lines.append(Case(case, _case_just(case)))
        refs = [b.given(n, "hypothesis", f, "case assumption")
                for n, f in zip(_hyp_names(case), _case_hyp_facts(b, case))]
        _run_case(b, case, refs)
        b.lines.append(End(case))


def derive_equalities(system: ConstraintSystem) -> Certificate:
    b = _open_factor(system)
    _equalities(b, system)
    return b.certificate()


def derive_identities(system: ConstraintSystem, equalities: Certificate) -> Certificate:
    replay(equalities, system=system, require_contradiction=False)
    b = _Builder.resume(equalities, system.factor)
    _identities(b, system)
    return b.certificate()


def _factor_section(system: ConstraintSystem) -> _Builder:
    eq = derive_equalities(system)
    ident = derive_identities(system, eq)
    return _Builder.resume(ident, system.factor)


def infeasibility_certificate(j: str = "j") -> Certificate:
    system = symbolic_system(j)
    b = _factor_section(system)
    _case_split(b)
    b.lines.append(Qed(b.certificate().steps[-1].kind))
    return b.certificate()


def case_certificate(case: str, j: str = "j") -> Certificate:
    """Stand-alone certificate for one case, its hypotheses taken as premises."""
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {', '.join(CASES)}")
    system = symbolic_system(j)
    b = _factor_section(system)
    refs = [b.given(n, "hypothesis", f, _case_just(case))
            for n, f in zip(_hyp_names(case), _case_hyp_facts(b, case))]
    _run_case(b, case, refs)
    b.lines.append(Qed(b.lines[-1].kind))
    return b.certificate()


# ---------------------------------------------------------------------------
# section 2: two factors j != k


def _hypercomplex(b: _Builder) -> None:
    E = lambda t: parse_expr(t)  # noqa: E731
    b.section("two factors j != k of a hypercomplex structure (I,J,K) on su(2)^4")
    for name, op, u in (("NI", "I", "J(Ej)"), ("NJ", "J", "I(Ej)")):
        params = f"{op}; {u}, Ek"
        b.given(name, "nijenhuis", Fact.eq(nijenhuis_expansion(params)), f"N_{op} vanishes", params)
    b.given("IJ", "hypothesis", Fact.eq(E("I(J(Ej)) - K(Ej)")), "IJ = K")
    b.given("JI", "hypothesis", Fact.eq(E("J(I(Ej)) + K(Ej)")), "JI = -K")
    comm = "distinct factors commute; Ej lies in the invariant planes of I and J in factor j"
    b.given("C1", "hypothesis", Fact.eq(E("[J(Ej),Ek]")), comm)
    b.given("C2", "hypothesis", Fact.eq(E("[J(Ej),I(Ek)]")), comm)
    b.given("C3", "hypothesis", Fact.eq(E("[I(Ej),Ek]")), comm)
    b.given("C4", "hypothesis", Fact.eq(E("[I(Ej),J(Ek)]")), comm)
    b.given("SPAN", "hypothesis", Fact.eq(E("[K(Ej),Ek] - lam*Ek")),
            "[K(Ej),Ek] lies in factor k and in both invariant planes there, whose meet is spanned by Ek")
    b.given("EXP", "hypothesis", Fact.eq(E("[Ek,I(Ek)] - mu1*Ek - mu2*I(Ek) - mu3*J(Ek)")),
            "Ek, I(Ek), J(Ek) are a basis of factor k")
    b.given("LAM", "hypothesis", Fact.nonzero(E("lam")),
            "I[KEj,Ek] = [KEj,IEk] with ad(KEj) nonzero on factor k")
    b.given("BR", "hypothesis", Fact.nonzero(E("[I(Ek),Ek]")),
            "Ek and I(Ek) are independent, and independent vectors in su(2) have a nonzero bracket")

    h1 = b.step("substitute", "$NI / $IJ:I(J(Ej)) / $C1:[J(Ej),Ek] / $C2:[J(Ej),I(Ek)]",
                Fact.eq(E("I([K(Ej),Ek]) - [K(Ej),I(Ek)]")), "N_I(J Ej, Ek) = 0 gives I[KEj,Ek] = [KEj,IEk]")
    h2 = b.step("substitute", "$NJ / $JI:J(I(Ej)) / $C3:[I(Ej),Ek] / $C4:[I(Ej),J(Ek)]",
                Fact.eq(E("-J([K(Ej),Ek]) + [K(Ej),J(Ek)]")), "N_J(I Ej, Ek) = 0 gives J[KEj,Ek] = [KEj,JEk]")
    h3 = b.step("substitute", f"{h1} / $SPAN:[K(Ej),Ek]", Fact.eq(E("lam*I(Ek) - [K(Ej),I(Ek)]")),
                "so [KEj,IEk] = lam IEk")
    h4 = b.step("substitute", f"{h2} / $SPAN:[K(Ej),Ek]", Fact.eq(E("-lam*J(Ek) + [K(Ej),J(Ek)]")),
                "so [KEj,JEk] = lam JEk")
    h5 = b.step("linear-combine", "(1)*[K(Ej), $EXP]",
                Fact.eq(E("[K(Ej),[Ek,I(Ek)]] - mu1*[K(Ej),Ek] - mu2*[K(Ej),I(Ek)] - mu3*[K(Ej),J(Ek)]")),
                "apply ad(KEj) to the expansion of [Ek,IEk]")
    h6 = b.step("substitute", f"{h5} / $SPAN:[K(Ej),Ek] / {h3}:[K(Ej),I(Ek)] / {h4}:[K(Ej),J(Ek)]",
                Fact.eq(E("[K(Ej),[Ek,I(Ek)]] - lam*mu1*Ek - lam*mu2*I(Ek) - lam*mu3*J(Ek)")),
                "ad(KEj) is lam times the identity on factor k")
    h7 = b.step("linear-combine", f"(1)*{h6} + (-lam)*$EXP", Fact.eq(E("[K(Ej),[Ek,I(Ek)]] - lam*[Ek,I(Ek)]")),
                "so [KEj,[Ek,IEk]] = lam [Ek,IEk]")
    h8 = b.step("jacobi", f"(1)*Jac[I(Ek), K(Ej), Ek] + (-1)*[I(Ek), $SPAN] + (-1)*{h7} + (-1)*[Ek, {h3}]",
                Fact.eq(E("lam*[I(Ek),Ek]")),
                "the Jacobi sum for IEk, KEj, Ek equals lam [IEk,Ek]")
    b.step("zero-vs-nonzero-contradiction", f"{h8} / $LAM, $BR", Fact.contradiction(),
           "lam [IEk,Ek] is nonzero, which is a contradiction")


def theorem_certificate(j: str = "j") -> Certificate:
    """One certificate: the factor-level infeasibility, then the two-factor argument."""
    system = symbolic_system(j)
    b = _factor_section(system)
    _case_split(b)
    _hypercomplex(b)
    b.lines.append(Qed(b.lines[-1].kind))
    return b.certificate()
