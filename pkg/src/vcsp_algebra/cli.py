"""Command-line front end.

Every command prints a one-line summary and produces a JSON result holding
the tool version, the full configuration and the result proper.  With
``--out FILE`` the result goes to that file and the summary to stdout;
otherwise the result goes to stdout and the summary to stderr.

Exit codes: 0 success, 2 UNKNOWN verdict or budget exhausted, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .classify import (
    NP_HARD,
    UNKNOWN,
    Verdict,
    classify_boolean,
    classify_conservative,
    hardness_certificate,
    reduce_one_in_three,
    verify_evidence,
)
from .config import Budget
from .cores import compute_core, core_report, reduce_rigid_instance, rigid_core
from .errors import BudgetExceeded, InputError, InternalContradiction, ParseError, VCSPError
from .language import language_from_dict, language_to_dict, load_language, serialize_language
from .polymorphisms import enumerate_polymorphisms
from .rationals import INF, format_ext
from .varieties import (
    load_congruence,
    power_lift,
    power_lift_instance,
    quotient_lift,
    subalgebra_restrict,
    swap_functions,
)
from .vcsp import express, load_instance, serialize_instance, solve
from .weightings import (
    build_indicator,
    find_violation,
    positive_clone,
    weighting_from_dict,
    weighting_to_dict,
)

EXIT_OK, EXIT_INTERNAL, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3

STATUS_TEXT = {
    "NP_HARD": "NP-hard",
    "TRACTABLE": "tractable",
    "CONJECTURED_TRACTABLE": "conjectured tractable",
    "UNKNOWN": "unknown",
}


class Outcome:
    """Result payload, summary line and exit code of one command."""

    def __init__(self, result, summary, code=EXIT_OK, language=None, instance=None):
        self.result = result
        self.summary = summary
        self.code = code
        self.language = language
        self.instance = instance


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", f"{path}: line {e.lineno}") from None


def _assignment(a: dict) -> dict:
    return {v: a[v] for v in sorted(a)}


def _fn_dict(f):
    return {"name": f.name, "arity": f.arity, "values": [format_ext(v) for v in f.table]}


def _tables(ops):
    return [list(f.table) for f in ops]


def _verdict_outcome(v: Verdict) -> Outcome:
    code = EXIT_UNKNOWN if v.status == UNKNOWN else EXIT_OK
    return Outcome(v.to_dict(), STATUS_TEXT[v.status], code)


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args, budget):
    inst, _, _ = load_instance(args.instance)
    value, s = solve(inst, budget)
    result = {"optimum": format_ext(value), "assignment": None if value is INF else _assignment(s)}
    return Outcome(result, f"optimum {format_ext(value)}")


def cmd_express(args, budget):
    inst, _, _ = load_instance(args.instance)
    names = [v for v in args.vars.split(",") if v]
    f = express(inst, names, args.name, budget)
    return Outcome({"cost_function": _fn_dict(f), "variables": names}, f"expressed {f.arity}-ary function")


def cmd_polymorphisms(args, budget):
    lang = load_language(args.language)
    ops = enumerate_polymorphisms(lang, args.arity, budget)
    return Outcome({"arity": args.arity, "count": len(ops), "operations": _tables(ops)},
                   f"{len(ops)} polymorphisms of arity {args.arity}")


def cmd_positive_clone(args, budget):
    lang = load_language(args.language)
    members, witnesses = positive_clone(lang, args.arity, budget, with_witnesses=True)
    result = {
        "arity": args.arity,
        "count": len(members),
        "operations": _tables(members),
        "witnesses": [weighting_to_dict(w) for w in witnesses],
    }
    return Outcome(result, f"{len(members)} operations in the positive clone at arity {args.arity}")


def cmd_wpol_check(args, budget):
    lang = load_language(args.language)
    omega = weighting_from_dict(_read_json(args.weighting), lang.n, str(args.weighting))
    w = find_violation(omega, lang)
    if w is None:
        return Outcome({"weighted_polymorphism": True, "witness": None}, "weighted polymorphism")
    witness = {"function": w["function"], "tuples": w["tuples"], "value": format_ext(w["value"])}
    return Outcome({"weighted_polymorphism": False, "witness": witness}, "not a weighted polymorphism")


def cmd_indicator(args, budget):
    lang = load_language(args.language)
    ind = build_indicator(lang, args.arity, budget)
    f = ind.cost_function("indicator", budget)
    result = {
        "arity": args.arity,
        "P": format_ext(ind.P),
        "indicator": _fn_dict(f),
        "positive_clone": _tables(ind.pol_plus),
        "term_weights": [format_ext(z) for z in ind.z],
    }
    return Outcome(result, f"indicator with P = {format_ext(ind.P)}")


def cmd_core(args, budget):
    lang = load_language(args.language)
    rep = core_report(lang, budget)
    core, elements, chain = compute_core(lang, budget)
    result = {
        "is_core": rep.is_core,
        "witness": None if rep.is_core else list(rep.witness.table),
        "weighting": None if rep.is_core else weighting_to_dict(rep.weighting),
        "elements": list(elements),
        "chain": [list(c) for c in chain],
        "language": language_to_dict(core),
    }
    summary = "core" if rep.is_core else f"not a core; core on elements {list(elements)}"
    return Outcome(result, summary, language=core)


def cmd_rigid_core(args, budget):
    lang = load_language(args.language)
    out = rigid_core(lang, budget)
    return Outcome({"language": language_to_dict(out)}, f"rigid core with {len(out)} functions", language=out)


def cmd_reduce_rigid(args, budget):
    lang = load_language(args.language)
    inst, rigid, _ = load_instance(args.instance)
    red = reduce_rigid_instance(lang, rigid, inst, budget)
    result = {
        "P": format_ext(red.P),
        "Q": None if red.Q is None else format_ext(red.Q),
        "bound": format_ext(red.bound),
        "copies": red.m,
        "fresh_variables": list(red.fresh),
        "language": language_to_dict(red.language),
    }
    if args.recover:
        value, a = red.recover(budget)
        result["recovered_optimum"] = format_ext(value)
        result["recovered_assignment"] = None if a is None else _assignment(a)
    return Outcome(result, f"{red.m} indicator copies, P = {format_ext(red.P)}",
                   language=red.language, instance=red.instance)


def _ops_language_clone(path, arity, budget):
    lang = load_language(path)
    ops = []
    for m in range(1, arity + 1):
        ops.extend(positive_clone(lang, m, budget))
    return ops


def cmd_lift(args, budget):
    lang = load_language(args.language)
    inst = None
    if args.instance:
        inst, inst_lang, _ = load_instance(args.instance)
        if inst_lang != lang:
            raise InputError("instance refers to a different language", args.instance)
    if args.kind == "power":
        if args.exponent is None:
            raise InputError("lift power needs --exponent")
        out = power_lift(lang, args.exponent, budget)
        new_inst = power_lift_instance(inst, out, args.exponent) if inst else None
        summary = f"lifted to {out.n} elements, exponent {args.exponent}"
    elif args.kind == "quotient":
        if args.congruence is None:
            raise InputError("lift quotient needs --congruence")
        cong = load_congruence(args.congruence)
        ops = _ops_language_clone(args.ops_language, args.arity or 1, budget) if args.ops_language else None
        out = quotient_lift(lang, cong, ops)
        new_inst = swap_functions(inst, out) if inst else None
        summary = f"pulled back along {len(cong.classes)} classes"
    else:
        if args.subset is None:
            raise InputError("lift sub needs --subset")
        subset = [int(x) for x in args.subset.split(",") if x != ""]
        source = args.ops_language or args.language
        ops = _ops_language_clone(source, args.arity or 1, budget)
        out = subalgebra_restrict(lang, subset, ops)
        new_inst = swap_functions(inst, out) if inst else None
        summary = f"restricted to {sorted(set(subset))}"
    result = {"kind": args.kind, "language": language_to_dict(out)}
    if new_inst is not None:
        value, s = solve(new_inst, budget)
        result["optimum"] = format_ext(value)
    return Outcome(result, summary, language=out, instance=new_inst)


def cmd_classify(args, budget):
    lang = load_language(args.language)
    if args.kind == "boolean":
        v = classify_boolean(lang, budget)
    elif args.kind == "taylor":
        v = hardness_certificate(lang, budget, args.arity)
    else:
        v = classify_conservative(lang, budget)
    return _verdict_outcome(v)


def cmd_reduce_1in3(args, budget):
    lang = load_language(args.language)
    formula = _read_json(args.formula)
    if not isinstance(formula, dict) or set(formula) != {"clauses"}:
        raise ParseError("formula must be an object with a single 'clauses' list", args.formula)
    clauses = formula["clauses"]
    if not isinstance(clauses, list) or not all(
        isinstance(c, list) and all(isinstance(v, str) for v in c) for c in clauses
    ):
        raise ParseError("clauses must be lists of variable names", args.formula)
    if args.certificate:
        v = Verdict.from_dict(_read_json(args.certificate).get("result"))
        problems = verify_evidence(v, lang, budget)
        if problems:
            raise InputError("certificate does not verify: " + "; ".join(problems), args.certificate)
    else:
        v = hardness_certificate(lang, budget)
    if v.status != NP_HARD or v.evidence.get("kind") != "quotient":
        return Outcome({"status": v.status}, "no hardness certificate available", EXIT_UNKNOWN)
    gc = language_from_dict(v.evidence["rigid_core"])
    red = reduce_one_in_three(gc, v, [tuple(c) for c in clauses], budget)
    value, _ = solve(red.instance, budget)
    target = len(clauses) * red.P
    result = {
        "P": format_ext(red.P),
        "clauses": len(clauses),
        "relation": [list(t) for t in red.relation],
        "cost_function": _fn_dict(red.rho),
        "optimum": format_ext(value),
        "satisfiable": value == target,
    }
    summary = "1-in-3 satisfiable" if value == target else "not 1-in-3 satisfiable"
    return Outcome(result, summary, language=red.language, instance=red.instance)


def cmd_verify_evidence(args, budget):
    lang = load_language(args.language)
    data = _read_json(args.result)
    payload = data.get("result") if isinstance(data, dict) and "result" in data else data
    v = Verdict.from_dict(payload)
    problems = verify_evidence(v, lang, budget)
    code = EXIT_OK if not problems else EXIT_INPUT
    return Outcome({"valid": not problems, "status": v.status, "problems": problems},
                   "evidence valid" if not problems else "evidence INVALID", code)


# ---------------------------------------------------------------------------
# plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-assignments", type=int, default=Budget().assignments,
                        help="cap on brute-force assignments")
    common.add_argument("--budget-ops", type=int, default=Budget().ops,
                        help="cap on operations kept in an operation set")
    common.add_argument("--budget-cells", type=int, default=Budget().op_cells,
                        help="cap on table cells of enumerated operations")
    common.add_argument("--budget-rows", type=int, default=Budget().lp_rows, help="cap on LP rows")
    common.add_argument("--budget-nodes", type=int, default=Budget().nodes, help="cap on search nodes")
    common.add_argument("--seed", type=int, default=0, help="recorded in the result; no command draws random numbers")
    common.add_argument("--out", help="write the JSON result here")
    common.add_argument("--emit-language", help="write the produced language file here")
    common.add_argument("--emit-instance", help="write the produced instance file here (needs --emit-language)")

    p = argparse.ArgumentParser(prog="vcsp-algebra", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("solve", cmd_solve, "exact optimum of an instance")
    sp.add_argument("instance")
    sp = add("express", cmd_express, "cost function expressed by an instance")
    sp.add_argument("instance")
    sp.add_argument("--vars", required=True, help="comma-separated projection list")
    sp.add_argument("--name", default="expressed")
    for name, fn, h in [
        ("polymorphisms", cmd_polymorphisms, "enumerate polymorphisms"),
        ("positive-clone", cmd_positive_clone, "operations with positive weight in some weighted polymorphism"),
        ("indicator", cmd_indicator, "indicator cost function over m-ary operations"),
    ]:
        sp = add(name, fn, h)
        sp.add_argument("language")
        sp.add_argument("--arity", type=int, default=1)
    sp = add("wpol-check", cmd_wpol_check, "check a weighting file against a language")
    sp.add_argument("language")
    sp.add_argument("weighting")
    sp = add("core", cmd_core, "core test and core computation")
    sp.add_argument("language")
    sp = add("rigid-core", cmd_rigid_core, "add the crisp constants to a core")
    sp.add_argument("language")
    sp = add("reduce-rigid", cmd_reduce_rigid, "rewrite a rigid-core instance over the core")
    sp.add_argument("language", help="the core language")
    sp.add_argument("instance", help="instance over the rigid core")
    sp.add_argument("--recover", action="store_true", help="solve and recover the original optimum")
    sp = add("lift", cmd_lift, "power, quotient and subalgebra transforms")
    sp.add_argument("kind", choices=["power", "quotient", "sub"])
    sp.add_argument("language")
    sp.add_argument("--instance")
    sp.add_argument("--exponent", type=int)
    sp.add_argument("--congruence", help="JSON list of classes")
    sp.add_argument("--subset", help="comma-separated elements (sub)")
    sp.add_argument("--ops-language", help="language whose positive clone supplies the operations")
    sp.add_argument("--arity", type=int, help="largest operation arity checked (default 1)")
    sp = add("classify", cmd_classify, "complexity classification")
    sp.add_argument("kind", choices=["boolean", "taylor", "conservative"])
    sp.add_argument("language")
    sp.add_argument("--arity", type=int, help="largest arity searched (taylor; default: least prime above n)")
    sp = add("reduce-1in3", cmd_reduce_1in3, "One-in-Three SAT to the rigid core")
    sp.add_argument("language")
    sp.add_argument("formula", help='JSON {"clauses": [["x","y","z"], ...]}')
    sp.add_argument("--certificate", help="result file of 'classify taylor'")
    sp = add("verify-evidence", cmd_verify_evidence, "re-check a verdict's evidence")
    sp.add_argument("language")
    sp.add_argument("result")
    return p


def _config(args) -> dict:
    skip = {"func", "out", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(args, outcome: Outcome):
    if args.emit_language and outcome.language is not None:
        _write(args.emit_language, serialize_language(outcome.language))
    if args.emit_instance and outcome.instance is not None:
        if not args.emit_language:
            raise InputError("--emit-instance needs --emit-language for the function tables")
        base = os.path.dirname(os.path.abspath(args.emit_instance))
        ref = os.path.relpath(os.path.abspath(args.emit_language), base)
        _write(args.emit_instance, serialize_instance(outcome.instance, ref))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, which would read as UNKNOWN
        return EXIT_INPUT if e.code == 2 else (e.code or 0)
    try:
        budget = Budget(args.budget_assignments, args.budget_cells, args.budget_nodes,
                        args.budget_ops, args.budget_rows)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        outcome = args.func(args, budget)
        _emit(args, outcome)
    except BudgetExceeded as e:
        outcome = Outcome({"budget_exceeded": str(e)}, f"budget exceeded: {e}", EXIT_UNKNOWN)
    except InternalContradiction as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (VCSPError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    doc = {
        "tool": "vcsp-algebra",
        "version": __version__,
        "command": args.command,
        "config": _config(args),
        "result": outcome.result,
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(args.out, text)
        print(outcome.summary)
    else:
        sys.stdout.write(text)
        print(outcome.summary, file=sys.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
