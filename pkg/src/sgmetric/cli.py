"""Command-line front end.

Every command prints a run report (``--json``) or a short human summary.
Exit codes: 0 pass / result produced, 1 mathematical finding, 2 input or
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .errors import AxiomViolation, Finding, InputError
from .fraisse import (
    TriangleFamily,
    build_generic,
    check_amalgamation,
    check_forbidden,
    classify_semigroups,
    fragments,
)
from .geodesics import DEFAULT_MAX_LEN, compute_bound
from .independence import (
    SUITES,
    QueryBounds,
    SupportBudget,
    corrupted_indep,
    find_unsupported_witness,
    indep,
    support_sets,
)
from .semigroup import PosetSemigroup, enumerate_pocs, parse_semigroup_spec, validate
from .space import MetricSpace

EXIT_PASS, EXIT_FINDING, EXIT_ERROR = 0, 1, 2
RELATIONS = {"shortest-path": indep, "corrupted": corrupted_indep}


class UsageError(InputError):
    pass


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _read_semigroup_json(ref: str) -> tuple[dict, str]:
    path = Path(ref)
    if path.exists():
        try:
            return json.loads(path.read_text()), ref
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read {ref}: {exc}") from None
    if ":" in ref:
        return parse_semigroup_spec(ref).to_json(), ref
    raise InputError(f"{ref!r} is neither a readable file nor an inline spec like path:4")


def _load_semigroup(ref: str) -> PosetSemigroup:
    path = Path(ref)
    if not path.exists() and ":" in ref:
        return parse_semigroup_spec(ref)
    data, name = _read_semigroup_json(ref)
    if not isinstance(data, dict):
        raise InputError("semigroup JSON must be an object")
    try:
        return PosetSemigroup.from_json(data, name=name)
    except AxiomViolation as exc:
        raise InputError(f"not a partially ordered commutative semigroup: {exc}") from None


def _parse_kv(text: str | None) -> dict[str, str]:
    out: dict[str, str] = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"expected key=value in {text!r}")
        out[key.strip()] = value.strip()
    return out


# -- commands: each returns (outcome, payload) ---------------------------------


def cmd_validate(args) -> tuple[str, dict]:
    data, _ = _read_semigroup_json(args.semigroup)
    if not isinstance(data, dict) or not {"elements", "op", "leq"} <= set(data):
        raise InputError('semigroup JSON needs "elements", "op" and "leq"')
    try:
        report = validate(data["elements"], data["op"], data["leq"])
    except TypeError as exc:
        raise InputError(f"malformed tables: {exc}") from None
    payload = {"validation": report.to_json(), "archimedean": None, "archimedean_witness": None,
               "maximum": None, "identity": None}
    if report.passed:
        M = PosetSemigroup.from_json(data)
        arch, wit = M.is_archimedean()
        top = M.maximum()
        payload["archimedean"] = arch
        payload["archimedean_witness"] = None if wit is None else [M.label(x) for x in wit]
        payload["maximum"] = None if top is None else M.label(top)
        e = M.identity()
        payload["identity"] = None if e is None else M.label(e)
    return ("pass" if report.passed else "fail"), payload


def cmd_bound(args) -> tuple[str, dict]:
    M = _load_semigroup(args.semigroup)
    bound = compute_bound(M, args.max_len)
    return "pass", {"bound": bound, "max_len": args.max_len, "exceeds_max_len": bound is None}


def cmd_check(args) -> tuple[str, dict]:
    M = _load_semigroup(args.semigroup)
    fp = _parse_kv(args.fragment_params)
    known = {"count", "size", "kind", "rounds", "max_base"}
    if set(fp) - known:
        raise UsageError(f"unknown fragment parameters {sorted(set(fp) - known)}; allowed {sorted(known)}")
    try:
        count = int(fp.get("count", 16))
        size = int(fp.get("size", 10))
        rounds = int(fp.get("rounds", 3))
        max_base = int(fp.get("max_base", 2))
    except ValueError:
        raise UsageError("fragment parameters count, size, rounds, max_base are integers") from None
    kind = fp.get("kind", "mixed")
    if count < 1:
        raise UsageError("fragment count must be >= 1")
    frags = list(fragments(M, count, seed=args.seed, kind=kind, size=size, rounds=rounds, max_base=max_base))
    bounds = QueryBounds(args.max_a, args.max_b, args.max_c)
    report = SUITES[args.suite](M, frags, trials=args.trials, seed=args.seed, bounds=bounds,
                                relation=RELATIONS[args.relation], max_fragments=count)
    payload = report.to_json()
    payload["fragment_params"] = {"count": count, "size": size, "kind": kind, "rounds": rounds,
                                  "max_base": max_base}
    payload["relation"] = args.relation
    return ("pass" if report.passed else "fail"), payload


def cmd_support(args) -> tuple[str, dict]:
    M = _load_semigroup(args.semigroup)
    if args.space:
        try:
            data = json.loads(Path(args.space).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read {args.space}: {exc}") from None
        s = MetricSpace.from_json(data, base_dir=Path(args.space).parent, semigroup=M)
        if args.a is None or args.b is None:
            raise UsageError("--space needs --a and --b (and optionally --C)")
        C = s.indices(args.C.split(",")) if args.C else []
        a, b = s.index(args.a), s.index(args.b)
        sets = support_sets(s, a, C, b, args.k)
        payload = {"k": args.k, "a": args.a, "b": args.b, "C": [s.vertices[c] for c in C],
                   "supports": [[s.vertices[c] for c in sub] for sub in sets]}
        return ("pass" if sets else "fail"), payload
    budget = SupportBudget(max_vertices=args.max_vertices, trials=args.budget_trials, seed=args.seed)
    w = find_unsupported_witness(M, args.k, budget)
    payload = {
        "k": args.k,
        "budget": {"max_vertices": budget.max_vertices, "trials": budget.trials, "seed": budget.seed},
        "k_supported_within_budget": w is None,
        "witness": None if w is None else w.to_json(),
    }
    return ("pass" if w is None else "fail"), payload


def _family(args) -> TriangleFamily | None:
    return TriangleFamily.load(args.family) if args.family else None


def cmd_amalgamation(args) -> tuple[str, dict]:
    M = _load_semigroup(args.semigroup)
    report = check_amalgamation(M, args.base, family=_family(args), jobs=args.jobs)
    return ("pass" if report.passed else "fail"), report.to_json()


def cmd_generic(args) -> tuple[str, dict]:
    M = _load_semigroup(args.semigroup)
    family = _family(args)
    s = build_generic(M, args.rounds, args.max_base, args.max_vertices, seed=args.seed, family=family)
    bad = check_forbidden(s, family) if family else []
    return ("pass" if not bad else "fail"), {"space": s.to_json(), "vertices": s.n, "forbidden_triangles": bad}


def cmd_enumerate(args) -> tuple[str, dict]:
    found = list(enumerate_pocs(args.max_size))
    by_size: dict[str, int] = {}
    for M in found:
        by_size[str(M.size)] = by_size.get(str(M.size), 0) + 1
    return "pass", {
        "max_size": args.max_size,
        "count": len(found),
        "counts_by_size": by_size,
        "archimedean": sum(M.is_archimedean()[0] for M in found),
        "semigroups": [{"key": M.name, **M.to_json()} for M in found],
    }


def cmd_classify(args) -> tuple[str, dict]:
    budget = SupportBudget(max_vertices=args.max_vertices, trials=args.budget_trials, seed=args.seed)
    rows = classify_semigroups(args.max_size, args.base, jobs=args.jobs, budget=budget)
    return "pass", {"max_size": args.max_size, "base_bound": args.base, "count": len(rows), "rows": rows}


# -- human-readable summaries --------------------------------------------------


def _summary(command: str, outcome: str, payload: dict) -> str:
    if outcome == "error":
        return f"error: {payload.get('error')}"
    if command == "validate":
        v = payload["validation"]
        if not v["passed"]:
            return "\n".join(["FAIL"] + [f"  {x['axiom']}: witness {x['witness']}" for x in v["violations"]])
        return f"PASS archimedean={payload['archimedean']} maximum={payload['maximum']}"
    if command == "bound":
        if payload["bound"] is None:
            return f"bound exceeds max_len {payload['max_len']}"
        return f"bound {payload['bound']}"
    if command == "check":
        lines = [f"{outcome.upper()} suite={payload['suite']} trials={payload['trials']}"]
        for r in payload["results"]:
            mark = "ok" if r["passed"] else "COUNTEREXAMPLE"
            lines.append(f"  {r['axiom']:<20} {mark} ({r['applicable']} applicable)")
        return "\n".join(lines)
    if command == "support":
        if "supports" in payload:
            return f"{len(payload['supports'])} supports of size <= {payload['k']}: {payload['supports']}"
        w = payload["witness"]
        if w is None:
            return f"no witness against {payload['k']}-supportedness within budget"
        return (f"not {payload['k']}-supported: a={w['a']} b={w['b']} C={w['C']}\n"
                + "\n".join("  " + " ".join(f"{x or '-':>7}" for x in row) for row in w["space"]["d"]))
    if command == "amalgamation":
        head = f"{outcome.upper()} bases={payload['bases_checked']} pairs={payload['pairs_checked']}"
        return head if payload["passed"] else f"{head}\n  witness: {json.dumps(payload['witness'])}"
    if command == "generic":
        return f"{outcome.upper()} fragment with {payload['vertices']} vertices"
    if command == "enumerate":
        return f"{payload['count']} semigroups up to size {payload['max_size']} {payload['counts_by_size']}"
    if command == "classify":
        lines = [f"{payload['count']} semigroups"]
        for r in payload["rows"]:
            lines.append(f"  {r['key']:<28} arch={r['archimedean']!s:<5} amalg={r['amalgamation']!s:<4} "
                         f"bound={r['bound']!s:<4} 1-supp={r['one_supported']}")
        return "\n".join(lines)
    return json.dumps(payload)


COMMANDS = {
    "validate": cmd_validate,
    "bound": cmd_bound,
    "check": cmd_check,
    "support": cmd_support,
    "amalgamation": cmd_amalgamation,
    "generic": cmd_generic,
    "enumerate": cmd_enumerate,
    "classify": cmd_classify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="seed for randomized operations")
    common.add_argument("--json", action="store_true", help="print the JSON run report")
    common.add_argument("-o", "--output", help="also write the JSON run report to this file")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for batch operations")
    common.add_argument("--timing", action="store_true", help="add elapsed_ms to the report")

    p = argparse.ArgumentParser(prog="sgmetric", description="Semigroup-valued metric spaces toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    sg_help = "semigroup JSON file or inline spec (path:4, product:3,2, sauer:1,2,3)"

    q = sub.add_parser("validate", parents=[common], help="check the semigroup axioms")
    q.add_argument("semigroup", help=sg_help)

    q = sub.add_parser("bound", parents=[common], help="boundedness constant")
    q.add_argument("semigroup", help=sg_help)
    q.add_argument("--max-len", type=_positive, default=DEFAULT_MAX_LEN)

    q = sub.add_parser("check", parents=[common], help="randomized independence axiom suites")
    q.add_argument("semigroup", help=sg_help)
    q.add_argument("--suite", choices=sorted(SUITES), default="sir")
    q.add_argument("--trials", type=_positive, default=1000)
    q.add_argument("--fragment-params", help="count=16,size=10,kind=mixed,rounds=3,max_base=2")
    q.add_argument("--max-a", type=_positive, default=3)
    q.add_argument("--max-b", type=_positive, default=3)
    q.add_argument("--max-c", type=_positive, default=4)
    q.add_argument("--relation", choices=sorted(RELATIONS), default="shortest-path",
                   help="'corrupted' is a deliberately wrong relation for harness sanity checks")

    q = sub.add_parser("support", parents=[common], help="k-supportedness witnesses")
    q.add_argument("semigroup", help=sg_help)
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--max-vertices", type=_positive, default=5)
    q.add_argument("--budget-trials", type=int, default=50)
    q.add_argument("--space", help="space JSON; list the supports of one independence instead")
    q.add_argument("--a")
    q.add_argument("--b")
    q.add_argument("--C", help="comma-separated base labels")

    q = sub.add_parser("amalgamation", parents=[common], help="exhaustive strong amalgamation check")
    q.add_argument("semigroup", help=sg_help)
    q.add_argument("--base", type=int, default=2)
    q.add_argument("--family", help="forbidden-triangle family JSON")

    q = sub.add_parser("generic", parents=[common], help="build a fragment of the generic space")
    q.add_argument("semigroup", help=sg_help)
    q.add_argument("--rounds", type=_positive, default=2)
    q.add_argument("--max-base", type=_positive, default=2)
    q.add_argument("--max-vertices", type=_positive, default=12)
    q.add_argument("--family", help="forbidden-triangle family JSON")

    q = sub.add_parser("enumerate", parents=[common], help="all POCS up to isomorphism")
    q.add_argument("--max-size", type=_positive, default=3)

    q = sub.add_parser("classify", parents=[common], help="tabulate properties of enumerated POCS")
    q.add_argument("--max-size", type=_positive, default=3)
    q.add_argument("--base", type=int, default=2)
    q.add_argument("--max-vertices", type=_positive, default=5)
    q.add_argument("--budget-trials", type=int, default=20)
    return p


def _parameters(args) -> dict:
    skip = {"command", "json", "output", "timing", "seed", "jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS

    start = time.perf_counter()
    try:
        outcome, payload = COMMANDS[args.command](args)
        code = EXIT_PASS if outcome == "pass" else EXIT_FINDING
    except Finding as exc:
        outcome, code = "fail", EXIT_FINDING
        payload = {"finding": type(exc).__name__, "message": str(exc), "witness": exc.witness}
    except (InputError, ValueError) as exc:
        outcome, code = "error", EXIT_ERROR
        payload = {"error": str(exc)}

    report = {
        "command": args.command,
        "parameters": _parameters(args),
        "outcome": outcome,
        "payload": payload,
        "seed": args.seed,
    }
    if args.timing:
        report["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    text = json.dumps(report, indent=2, default=str)
    if args.output:
        try:
            Path(args.output).write_text(text + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    if args.json:
        print(text)
    elif outcome == "error":
        print(_summary(args.command, outcome, payload), file=sys.stderr)
    elif "finding" in payload:
        print(f"FAIL {payload['finding']}: {payload['message']}")
    else:
        print(_summary(args.command, outcome, payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
