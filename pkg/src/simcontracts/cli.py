"""Command-line entry point.

Exit status: 0 success / valid / clean, 1 semantic negative (refinement
fails, no valid setup, violations found), 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from collections import defaultdict

from .architecture import check_composability
from .configurator import DEFAULT_LIMIT, configure, contract_to_dict
from .contracts import (
    Contract,
    compose_all,
    conjoin,
    equalize_alphabets,
    is_compatible,
    is_consistent,
    quotient,
    refinement_witness,
    refines,
    refines_literal,
    saturate,
)
from .errors import ContractError, DanglingReference
from .language import render_assertion
from .monitor import check_trace, generate_monitors, read_trace_csv
from .projectfile import Project, read_project

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2

_REF_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_.\-]*)|(.))")


def resolve_contract(project: Project, text: str) -> Contract:
    """Resolve a contract reference.

    A reference is a contract id, a test-case id, or one of
    ``comp(a, b, ...)``, ``quot(top, by)``, ``conj(a, b)``, ``sat(a)``.
    """
    tokens = [(m.group(1), m.group(2)) for m in _REF_TOKEN.finditer(text) if m.group(1) or m.group(2)]
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def ref() -> Contract:
        nonlocal pos
        name, punct = peek()
        if name is None:
            raise DanglingReference(f"malformed contract reference {text!r}")
        pos += 1
        if peek()[1] != "(":
            if name in project.contracts:
                return project.contracts[name]
            if name in project.test_cases:
                return project.test_case_contract(name)
            raise DanglingReference(f"unknown contract or test case {name!r}")
        pos += 1
        args = [ref()]
        while peek()[1] == ",":
            pos += 1
            args.append(ref())
        if peek()[1] != ")":
            raise DanglingReference(f"malformed contract reference {text!r}")
        pos += 1
        if name == "comp":
            return compose_all(args, id=f"comp({','.join(a.id for a in args)})")
        if name == "quot" and len(args) == 2:
            return quotient(*args)
        if name == "conj" and len(args) == 2:
            return conjoin(*args)
        if name == "sat" and len(args) == 1:
            return saturate(args[0])
        raise DanglingReference(f"unknown contract operator {name}/{len(args)}")

    c = ref()
    if pos != len(tokens):
        raise DanglingReference(f"malformed contract reference {text!r}")
    return c


def _emit(args, human: str, machine) -> None:
    if args.format == "machine":
        sys.stdout.write(json.dumps(machine, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(human + "\n")


def _contract_text(c: Contract) -> str:
    return (
        f"contract {c.id}\n"
        f"  variables: {', '.join(c.alphabet.names)}\n"
        f"  assume:    {render_assertion(c.assumption)}\n"
        f"  guarantee: {render_assertion(c.guarantee)}"
    )


def _witness_text(w: dict) -> str:
    return ", ".join(f"{k}={'true' if v is True else 'false' if v is False else v}" for k, v in w.items())


def cmd_validate(args, project: Project) -> int:
    arch = project.architecture
    problems = []
    for m in arch.models:
        ports = arch.component(m.component).partition
        if not is_compatible(m.contract, ports):
            problems.append(f"model {m.id}: contract {m.contract.id} is not compatible (assumption constrains controlled ports)")
        if not is_consistent(m.contract, ports):
            problems.append(f"model {m.id}: contract {m.contract.id} is not consistent (guarantee constrains uncontrolled ports)")
    sources = defaultdict(list)
    for c in arch.components:
        for n in sorted(c.partition.controlled):
            sources[n].append(c.id)
    for n, comps in sorted(sources.items()):
        if len(comps) > 1:
            problems.append(f"variable {n} has {len(comps)} sources ({', '.join(comps)})")
    for tid in sorted(project.test_cases):
        project.test_case_contract(tid)
    summary = (
        f"{len(project.variables)} variables, {len(project.contracts)} contracts, "
        f"{len(arch.components)} components, {len(arch.models)} models, {len(project.test_cases)} test cases"
    )
    _emit(args, "\n".join([summary, *problems, "ok" if not problems else f"{len(problems)} problem(s)"]),
          {"ok": not problems, "problems": problems})
    return EXIT_OK if not problems else EXIT_NEGATIVE


def cmd_compose(args, project: Project) -> int:
    ids = [s.strip() for s in args.contracts.split(",") if s.strip()]
    if len(ids) < 2:
        raise DanglingReference("--contracts needs at least two contract ids")
    c = compose_all([resolve_contract(project, i) for i in ids], id="*".join(ids))
    _emit(args, _contract_text(c), contract_to_dict(c))
    return EXIT_OK


def cmd_quotient(args, project: Project) -> int:
    c = quotient(resolve_contract(project, args.top), resolve_contract(project, args.by))
    note = c.metadata.get("saturated_operands")
    human = _contract_text(c) + (f"\n  (saturated operands first: {', '.join(note)})" if note else "")
    machine = contract_to_dict(c)
    machine["saturated_operands"] = list(note or [])
    _emit(args, human, machine)
    return EXIT_OK


def cmd_refine(args, project: Project) -> int:
    sub, sup = equalize_alphabets(resolve_contract(project, args.sub), resolve_contract(project, args.super))
    ok = refines_literal(sub, sup) if args.strict_refinement else refines(sub, saturate(sup))
    witness = None if ok else refinement_witness(sub, sup, strict=args.strict_refinement)
    human = f"{sub.id} {'refines' if ok else 'does not refine'} {sup.id}"
    if witness is not None:
        human += f"\n  witness: {_witness_text(witness)}"
    _emit(args, human, {"sub": sub.id, "super": sup.id, "refines": ok,
                        "mode": "literal" if args.strict_refinement else "saturated", "witness": witness})
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_configure(args, project: Project) -> int:
    report = configure(project.architecture, project.test_case(args.test_case),
                       strict=args.strict_refinement, limit=args.limit)
    if args.format == "machine":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.summary() + "\n")
    return EXIT_OK if report.valid else EXIT_NEGATIVE


def cmd_monitor(args, project: Project) -> int:
    arch = project.architecture
    setup = {}
    for mid in (s.strip() for s in args.setup.split(",") if s.strip()):
        m = arch.model(mid)
        setup[m.component] = mid
    plan = check_composability(arch, setup)
    if not plan.ok:
        for d in plan.diagnostics:
            print(f"warning: {d.message}", file=sys.stderr)
    spec = generate_monitors(arch, setup, project.test_case_contract(args.test_case))
    try:
        trace = read_trace_csv(args.trace, spec.alphabet)
    except ContractError as exc:
        exc.message = f"{args.trace}: {exc.message}"
        raise
    report = check_trace(trace, spec, gated=not args.ungated)
    if args.format == "machine":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.table() + "\n")
    return EXIT_OK if report.verdict == "clean" else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simcontracts", description="Contract-based configuration of simulation setups.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("project", help="project file (JSON)")
    common.add_argument("--format", choices=("human", "machine"), default="human", help="output format")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], help="parse and check a project")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compose", parents=[common], help="print the parallel composition of contracts")
    p.add_argument("--contracts", required=True, help="comma-separated contract ids")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("quotient", parents=[common], help="print the quotient contract top/by")
    p.add_argument("--top", required=True)
    p.add_argument("--by", required=True)
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("refine", parents=[common], help="check whether --sub refines --super")
    p.add_argument("--sub", required=True, help="contract reference, e.g. comp(C1,C2a)")
    p.add_argument("--super", required=True, help="contract reference")
    p.add_argument("--strict-refinement", action="store_true", help="compare contracts as written, unsaturated")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("configure", parents=[common], help="find sufficiently valid setups for a test case")
    p.add_argument("--test-case", required=True)
    p.add_argument("--strict-refinement", action="store_true")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="maximum number of candidate setups")
    p.set_defaults(func=cmd_configure)

    p = sub.add_parser("monitor", parents=[common], help="check a recorded trace against a setup's contracts")
    p.add_argument("--test-case", required=True)
    p.add_argument("--setup", required=True, help="comma-separated model ids")
    p.add_argument("--trace", required=True, help="CSV trace file")
    p.add_argument("--ungated", action="store_true", help="check guarantees even where the assumption fails")
    p.set_defaults(func=cmd_monitor)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        project = read_project(args.project)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ContractError as exc:
        print(f"error: {args.project}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args, project)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
