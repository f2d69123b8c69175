"""Command-line entry point: ``hcx examples|check|derive-system|certify|search``.

Exit codes: 0 pass, 1 fixture failure, 2 structural failure, 3 input error,
4 certificate failure, 5 search alarm, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import liealg
from .acstruct import (
    Endomorphism,
    StructureError,
    describe_basis_index,
    example_structures,
    is_hypercomplex,
    is_integrable,
)
from .liealg import LieAlgebraError
from .nonexistence.certificate import Certificate, CertificateError, ReplayError, replay
from .nonexistence.proofs import case_certificate, theorem_certificate
from .nonexistence.structures import block_decompose, hypercomplex_obstruction, subspace_dims
from .nonexistence.system import compare_with_reference, symbolic_system
from .scalarpoly import Matrix

EXIT_OK = 0
EXIT_FIXTURE = 1
EXIT_STRUCTURE = 2
EXIT_INPUT = 3
EXIT_CERTIFICATE = 4
EXIT_ALARM = 5
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cell(text: str) -> tuple[int, int]:
    try:
        r, c = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected ROW,COL") from None
    return r, c


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _pair_text(g, pair) -> str:
    i, j = pair
    return f"({describe_basis_index(g, i)}, {describe_basis_index(g, j)})"


def _located(g, pair) -> str:
    """'pair (1,2) in factor 1' when both indices share a factor."""
    i, j = pair
    if g.factor_layout:
        fi = [n for n, (off, size) in enumerate(g.factor_layout, 1) if off <= i < off + size][0]
        fj = [n for n, (off, size) in enumerate(g.factor_layout, 1) if off <= j < off + size][0]
        if fi == fj:
            off = g.factor_layout[fi - 1][0]
            return f"pair ({i - off + 1},{j - off + 1}) in factor {fi}"
    return f"pair ({i + 1},{j + 1})"


def _acs_lines(name: str, g, J: Endomorphism) -> tuple[bool, list[str]]:
    rep = is_integrable(g, J)
    lines = [f"{name}: J^2 = -id {'yes' if rep.squares_to_minus_id else 'NO'}; "
             f"N_J on {g.dim * (g.dim - 1) // 2} basis pairs {'vanishes' if rep.nijenhuis_zero else 'does NOT vanish'}"]
    if rep.first_failing_pair is not None:
        value = ", ".join(liealg.format_vec(rep.failing_value))
        lines.append(f"  first failing pair {_pair_text(g, rep.first_failing_pair)} = "
                     f"{_located(g, rep.first_failing_pair)}: N = ({value})")
    return rep.integrable, lines


# ---------------------------------------------------------------------------


def cmd_examples(args) -> int:
    g = liealg.su2_power(2)
    fixtures = dict(zip(("J", "J'"), (e.on(g) for e in example_structures())))
    if args.mutate is not None:
        r, c = args.mutate
        name = args.mutate_target
        M = fixtures[name].matrix
        if not (1 <= r <= M.rows and 1 <= c <= M.cols):
            print(f"--mutate {r},{c} is outside the {M.rows}x{M.cols} matrix", file=sys.stderr)
            return EXIT_USAGE
        rows = M.to_rows()
        old = rows[r - 1][c - 1]
        rows[r - 1][c - 1] = -old if old else Fraction(1)
        fixtures[name] = Endomorphism(Matrix.from_rows(rows), g)
        print(f"mutated {name} entry ({r},{c}): {old} -> {rows[r - 1][c - 1]}")
    ok = True
    for name, J in fixtures.items():
        passed, lines = _acs_lines(name, g, J)
        ok &= passed
        print("\n".join(lines))
        if args.factor_dims and passed:
            for j in (1, 2):
                dim_e, dim_f = subspace_dims(block_decompose(J, j))
                print(f"  factor {j}: (dim E, dim F) = ({dim_e},{dim_f})")
    print("examples: PASS" if ok else "examples: FAIL")
    return EXIT_OK if ok else EXIT_FIXTURE


def _load_structures(algebra: str, files: list[str]):
    g = liealg.parse_algebra_spec(algebra)
    mats = []
    for path in files:
        with open(path) as fh:
            data = json.load(fh)
        mats.append(Endomorphism.from_json(data, g))
    return g, mats


def cmd_check(args) -> int:
    if len(args.files) not in (1, 3):
        print("check takes one structure file or three (I, J, K)", file=sys.stderr)
        return EXIT_USAGE
    try:
        g, mats = _load_structures(args.algebra, args.files)
    except (OSError, ValueError, KeyError, TypeError, StructureError, LieAlgebraError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if len(mats) == 1:
        passed, lines = _acs_lines(os.path.basename(args.files[0]), g, mats[0])
        print("\n".join(lines))
        print("integrable" if passed else "not integrable")
        return EXIT_OK if passed else EXIT_STRUCTURE
    I, J, K = mats
    rep = is_hypercomplex(g, I, J, K)
    for c in rep.checks:
        line = f"{c.name}: {'pass' if c.passed else 'FAIL'}"
        print(f"{line} ({c.detail})" if c.detail else line)
    if not rep.passed and rep.algebraic_passed and g.factor_layout and len(g.factor_layout) >= 2 \
            and all(size == 3 for _, size in g.factor_layout):
        obs = hypercomplex_obstruction(I, J, K, 1, 2)
        print(f"obstruction on factors (1,2): {obs.message()}")
    print("hypercomplex" if rep.passed else "not hypercomplex")
    return EXIT_OK if rep.passed else EXIT_STRUCTURE


def cmd_derive(args) -> int:
    system = symbolic_system(args.factor)
    sys.stdout.write(system.to_text())
    if not args.compare_paper:
        return EXIT_OK
    rows = compare_with_reference(system)
    matched = sum(r.matched for r in rows)
    print()
    for r in rows:
        status = {1: "match", -1: "match (sign -1)", None: "MISMATCH"}[r.sign]
        print(f"{r.label}: {status}")
        if not r.matched:
            print(f"  generated: {r.generated}\n  reference: {r.reference}")
    print(f"{matched}/{len(rows)} matched")
    return EXIT_OK if matched == len(rows) else EXIT_FIXTURE


def cmd_certify(args) -> int:
    system = symbolic_system(args.factor)
    if args.replay:
        try:
            with open(args.replay) as fh:
                cert = Certificate.from_text(fh.read())
        except OSError as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        except CertificateError as exc:
            print(f"certificate rejected: {exc}", file=sys.stderr)
            return EXIT_CERTIFICATE
        source = args.replay
    else:
        cert = case_certificate(args.case, args.factor) if args.case else theorem_certificate(args.factor)
        text = cert.to_text()
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
            source = args.output
        else:
            sys.stdout.write(text)
            source = "<stdout>"
        # replay what was written, not the in-memory object
        cert = Certificate.from_text(text)
    try:
        res = replay(cert, system=system)
    except ReplayError as exc:
        print(f"replay failed at step {exc.index}: {exc.message}", file=sys.stderr)
        return EXIT_CERTIFICATE
    print(f"replayed {res.steps} steps from {source}: QED {res.last_kind}", file=sys.stderr)
    return EXIT_OK


def cmd_search(args) -> int:
    # imported here so the exact subcommands do not pay for numba start-up
    from .search.harness import ALARM_THRESHOLD, run_search

    report = run_search(args.trials, args.seed, args.optimize, args.steps)
    text = report.to_json()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    verdict = "bounded away from zero" if not report.alarm else "ALARM: at or below threshold"
    print(f"best residual {report.best_residual:.6g} (seed {report.best_seed}) over {report.trials} trials; "
          f"{verdict} ({ALARM_THRESHOLD:g})", file=sys.stderr)
    return EXIT_ALARM if report.alarm else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hcx", description="Complex and hypercomplex structures on products of su(2).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ex = sub.add_parser("examples", help="verify the two complex structures on su(2)+su(2)")
    ex.add_argument("--factor-dims", action="store_true", help="print (dim E, dim F) for each factor")
    ex.add_argument("--mutate", type=_cell, metavar="ROW,COL", help="flip one matrix entry (1-based) before checking")
    ex.add_argument("--mutate-target", choices=("J", "J'"), default="J")
    ex.set_defaults(func=cmd_examples)

    ck = sub.add_parser("check", help="check one structure, or a triple I J K")
    ck.add_argument("--algebra", required=True, help="su2^m or a LieAlgebra JSON file")
    ck.add_argument("files", nargs="+", metavar="FILE")
    ck.set_defaults(func=cmd_check)

    dv = sub.add_parser("derive-system", help="print the per-factor integrability equations")
    dv.add_argument("--factor", default="j", help="factor index or symbol (default j)")
    dv.add_argument("--compare-paper", action="store_true", help="compare with the embedded reference equations")
    dv.set_defaults(func=cmd_derive)

    ce = sub.add_parser("certify", help="emit and replay the non-existence certificate")
    ce.add_argument("-o", "--output", help="write the certificate here (default stdout)")
    ce.add_argument("--case", choices=("A", "A2", "A3", "B"), help="emit only one case of the factor argument")
    ce.add_argument("--replay", metavar="FILE", help="replay an existing certificate instead")
    ce.add_argument("--factor", default="j", help=argparse.SUPPRESS)
    ce.set_defaults(func=cmd_certify)

    se = sub.add_parser("search", help="numerical search over conjugated quaternion triples on su(2)^4")
    se.add_argument("--trials", type=_positive, required=True)
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--optimize", action="store_true", help="pattern-search descent on each trial")
    se.add_argument("--steps", type=_positive, default=500, help="descent sweeps per trial")
    se.add_argument("-o", "--output", help="write the JSON report here (default stdout)")
    se.set_defaults(func=cmd_search)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
