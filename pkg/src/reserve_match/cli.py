"""``reserve-match`` command line.

Exit codes: 0 success / everything passed, 1 an audit or oracle found a
violation, 2 bad input or an enumeration guard was hit.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import io, kernels
from .choice import audit_choice, over_and_above_choose
from .critique import repro_report
from .da import audit_assignment, run_da_oa
from .model import ValidationError
from .oracle import (
    GeneratorParams,
    GuardError,
    SweepResult,
    contested_release_choose,
    drop_two_choose,
    generate_corpus,
    reserve_first_choose,
    rule_table,
    sweep,
)

logger = logging.getLogger("reserve_match")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CHECKS = ("theorem1", "subst", "sizemono", "manip", "stability")


def _emit(args, doc, text: str) -> None:
    sys.stdout.write(io.dumps(doc) if args.json else text.rstrip("\n") + "\n")


def _fmt(ids) -> str:
    return " ".join(ids) if ids else "-"


def cmd_choose(args) -> int:
    instance = io.load_instance(args.instance)
    inst = instance.institution(args.institution)
    if args.all:
        pool = list(instance.individual_ids())
    elif args.pool:
        pool = io.load_pool(args.pool)
    else:
        raise io.FormatError("give a pool file or --all")
    members = instance.memberships()
    result = over_and_above_choose(inst, pool, members)
    audit = audit_choice(inst, pool, result, members)
    body = io.choice_to_dict(instance, result)
    doc = {"institution": inst.id, "pool": io.ordered(pool, instance), **body,
           "audit": {k: io.violation_to_dict(v) for k, v in audit.items()}}
    lines = [f"institution {inst.id}  pool: {_fmt(doc['pool'])}",
             f"{instance.open_category}: {_fmt(body['open'])}"]
    lines += [f"{r}: {_fmt(v)}" for r, v in body["reserved"].items()]
    lines.append(f"rejected: {_fmt(body['rejected'])}")
    lines += [f"  {k}: {'ok' if v is None else 'VIOLATED - ' + v.detail}" for k, v in audit.items()]
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_match(args) -> int:
    instance = io.load_instance(args.instance)
    a, logs = run_da_oa(instance)
    doc = io.assignment_to_dict(instance, a)
    lines = []
    for i, seat in doc["assignment"].items():
        lines.append(f"{i}: {seat}" if seat == io.UNASSIGNED else f"{i}: ({seat['institution']}, {seat['category']})")
    if args.logs:
        doc["rounds"] = [io.round_to_dict(instance, log) for log in logs]
        for r in doc["rounds"]:
            lines.append(f"round {r['round']}: " + ", ".join(f"{i}->{s}" for i, s in r["proposals"]))
            for e in r["institutions"]:
                held = e["held"]
                parts = [f"open {_fmt(held['open'])}"] + [f"{c} {_fmt(v)}" for c, v in held["reserved"].items() if v]
                lines.append(f"  {e['institution']}: pool {_fmt(e['pool'])} | held {'; '.join(parts)}"
                             f" | rejected {_fmt(e['rejected'])}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_audit(args) -> int:
    instance = io.load_instance(args.instance)
    a = io.load_assignment(instance, args.assignment)
    report = audit_assignment(instance, a)
    ok = all(v is None for v in report.values())
    doc = {"passed": ok, "checks": {k: io.violation_to_dict(v) for k, v in report.items()}}
    lines = [f"{k}: {'PASS' if v is None else 'FAIL - ' + v.detail}" for k, v in report.items()]
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _self_test(instances) -> list[SweepResult]:
    """Planted broken rules and mechanisms; each is expected to be caught."""
    out = []
    axioms = SweepResult("theorem1[reserve-first]")
    for k, instance in enumerate(instances):
        axioms.instances += 1
        universe = list(instance.individual_ids())
        members = instance.memberships()
        for s in instance.institutions:
            for mask in range(1 << len(universe)):
                pool = kernels.ids_of(mask, universe)
                axioms.cases += 1
                audit = audit_choice(s, pool, reserve_first_choose(s, pool, members), members)
                bad = [v for v in audit.values() if v is not None]
                if bad:
                    axioms.witnesses.append({"instance": k, "institution": s.id, "pool": pool,
                                             "axiom": bad[0].axiom, "subjects": list(bad[0].subjects)})
    out.append(axioms)
    for name, rule, kind in (
        ("subst[contested-release]", contested_release_choose, "subst"),
        ("sizemono[drop-two]", drop_two_choose, "sizemono"),
    ):
        res = SweepResult(name)
        for k, instance in enumerate(instances):
            res.instances += 1
            universe = list(instance.individual_ids())
            members = instance.memberships()
            n = len(universe)
            for s in instance.institutions:
                table = rule_table(s, universe, members, rule)
                res.cases += 1 << n
                if kind == "subst":
                    a, i, j = kernels.substitutability_witness(table, n)
                    if a >= 0:
                        res.witnesses.append({"instance": k, "institution": s.id,
                                              "A": kernels.ids_of(int(a), universe),
                                              "i": universe[i], "j": universe[j]})
                else:
                    a, i = kernels.size_monotonicity_witness(table, n)
                    if a >= 0:
                        res.witnesses.append({"instance": k, "institution": s.id,
                                              "A": kernels.ids_of(int(a), universe), "i": universe[i]})
        out.append(res)
    manip = sweep(instances, "manip", mechanism="immediate")
    manip.check = "manip[immediate-acceptance]"
    out.append(manip)
    return out


def cmd_oracle(args) -> int:
    if args.random is not None:
        seed, count = args.random
        instances = generate_corpus(seed, count, GeneratorParams())
        source = {"random": {"seed": seed, "count": count}}
    elif args.instance:
        instances = [io.load_instance(args.instance)]
        source = {"instance": args.instance}
    else:
        raise io.FormatError("give an instance file or --random SEED COUNT")
    checks = CHECKS if args.check == "all" else (args.check,)
    results = _self_test(instances) if args.self_test else [sweep(instances, c) for c in checks]
    rows = [{"check": r.check, "instances": r.instances, "cases": r.cases,
             "witnesses": len(r.witnesses), "passed": r.passed,
             "first_witnesses": r.witnesses[: args.max_witnesses]} for r in results]
    doc = {"source": source, "self_test": args.self_test, "checks": rows}
    lines = [f"{'check':30} {'instances':>9} {'cases':>9} {'witnesses':>9}  status"]
    for r in rows:
        if args.self_test:
            status = "caught" if r["witnesses"] else "MISSED"
        else:
            status = "pass" if r["passed"] else "FAIL"
        lines.append(f"{r['check']:30} {r['instances']:>9} {r['cases']:>9} {r['witnesses']:>9}  {status}")
        for w in r["first_witnesses"]:
            lines.append(f"    {w}")
    _emit(args, doc, "\n".join(lines))
    if args.self_test:
        return EXIT_OK if all(r["witnesses"] for r in rows) else EXIT_FAIL
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


def cmd_repro(args) -> int:
    report = repro_report()
    lines = []
    for a in report["assertions"]:
        lines.append(f"({a['id']}) {'CONFIRMED' if a['holds'] else 'NOT CONFIRMED'}: {a['claim']}")
    lines.append("all assertions hold" if report["all_hold"] else "some assertions failed")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if report["all_hold"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reserve-match", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("choose", cmd_choose, "over-and-above choice at one institution")
    p.add_argument("instance", help="instance file or bundled fixture name")
    p.add_argument("institution")
    p.add_argument("pool", nargs="?", help="JSON list of individual ids")
    p.add_argument("--all", action="store_true", help="use every individual as the pool")

    p = add("match", cmd_match, "run DA-OA")
    p.add_argument("instance")
    p.add_argument("--logs", action="store_true", help="include round-by-round logs")

    p = add("audit", cmd_audit, "audit an assignment file")
    p.add_argument("instance")
    p.add_argument("assignment")

    p = add("oracle", cmd_oracle, "brute-force oracles")
    p.add_argument("instance", nargs="?")
    p.add_argument("--random", nargs=2, type=int, metavar=("SEED", "COUNT"))
    p.add_argument("--check", choices=CHECKS + ("all",), default="all")
    p.add_argument("--self-test", action="store_true",
                   help="run planted broken rules/mechanisms; success means they are caught")
    p.add_argument("--max-witnesses", type=int, default=3)

    add("repro", cmd_repro, "reproduce the three counterexamples")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (io.FormatError, ValidationError, GuardError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
