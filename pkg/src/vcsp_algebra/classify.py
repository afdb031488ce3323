"""Complexity verdicts with evidence that can be re-checked without searching.

Statuses: ``NP_HARD`` and ``TRACTABLE`` always carry checkable evidence;
``CONJECTURED_TRACTABLE`` means an idempotent cyclic operation exists in the
positive clone of the rigid core (the tractable side is conjectural in
general); ``UNKNOWN`` records why the search stopped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .config import DEFAULT_BUDGET, Budget
from .cores import core_report, rigid_core
from .errors import (
    BudgetExceeded,
    CertificateRequired,
    ConservativityRequired,
    DomainSizeError,
    InputError,
    VCSPError,
)
from .language import CostFunction, Language, feas, language_from_dict, language_to_dict, restrict_language
from .lp import FarkasCertificate, check_certificate
from .operations import (
    Operation,
    all_tuples,
    is_bijective,
    is_conservative,
    is_cyclic,
    is_idempotent,
    is_projection,
    lex_index,
    majority2,
    minority2,
    op_max,
    op_min,
    restrict,
)
from .polymorphisms import enumerate_polymorphisms
from .rationals import INF, format_ext, parse_ext
from .varieties import Congruence, closure_failure, find_incompatibility, quotient_operation
from .vcsp import Instance
from .weightings import (
    certified_positive_clone,
    exclusion_system,
    find_cyclic_wpol,
    find_violation,
    multimorphism,
    relation_indicator,
    weighting_from_dict,
    weighting_to_dict,
)

NP_HARD = "NP_HARD"
TRACTABLE = "TRACTABLE"
CONJECTURED_TRACTABLE = "CONJECTURED_TRACTABLE"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Verdict:
    status: str
    evidence: dict = field(default_factory=dict)
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {"status": self.status, "evidence": self.evidence, "notes": list(self.notes)}

    @classmethod
    def from_dict(cls, data) -> "Verdict":
        if not isinstance(data, dict) or set(data) != {"status", "evidence", "notes"}:
            raise InputError("verdict must have exactly 'status', 'evidence' and 'notes'")
        if data["status"] not in (NP_HARD, TRACTABLE, CONJECTURED_TRACTABLE, UNKNOWN):
            raise InputError(f"unknown status {data['status']!r}")
        return cls(data["status"], data["evidence"], tuple(data["notes"]))


def _tables(ops: Iterable[Operation]) -> list:
    return [list(f.table) for f in ops]


def _witness_json(w):
    if w is None:
        return None
    return {"function": w["function"], "tuples": w["tuples"], "value": format_ext(w["value"])}


# ---------------------------------------------------------------------------
# Boolean languages


def six_multimorphisms() -> list:
    """The six idempotent Boolean multimorphisms, as ``(name, operations)``."""
    mn, mx, mj, mi = op_min(), op_max(), majority2(), minority2()
    return [
        ("<min,min>", (mn, mn)),
        ("<max,max>", (mx, mx)),
        ("<min,max>", (mn, mx)),
        ("<Mjrty,Mjrty,Mjrty>", (mj, mj, mj)),
        ("<Mnrty,Mnrty,Mnrty>", (mi, mi, mi)),
        ("<Mjrty,Mjrty,Mnrty>", (mj, mj, mi)),
    ]


def multimorphism_violation(ops: Sequence[Operation], lang: Language):
    """Failure witness of the multimorphism ``ops`` (None if it is one).

    An operation leaving some feasibility relation shows up as value INF.
    """
    return find_violation(multimorphism(ops), lang, check_support=False)


def classify_boolean(lang: Language, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """Six-multimorphism test; a language admitting none is NP-hard exactly when it is a core."""
    if lang.n != 2:
        raise DomainSizeError(f"Boolean classification needs a 2-element domain, got {lang.n}")
    failures = []
    for name, ops in six_multimorphisms():
        w = multimorphism_violation(ops, lang)
        if w is None:
            return Verdict(TRACTABLE, {"kind": "multimorphism", "name": name, "operations": _tables(ops)})
        failures.append({"name": name, "operations": _tables(ops), "witness": _witness_json(w)})
    unary = certified_positive_clone(lang, 1, budget)
    bad = [f for f in unary.members if not is_bijective(f)]
    if bad:
        rep = core_report(lang, budget)
        return Verdict(
            TRACTABLE,
            {"kind": "non-core", "operation": list(rep.witness.table), "weighting": weighting_to_dict(rep.weighting)},
            ("a non-bijective unary operation gets positive weight; the core has one element",),
        )
    return Verdict(NP_HARD, {"kind": "six-failures", "failures": failures, "core_certificate": _clone_json(unary)})


# ---------------------------------------------------------------------------
# Taylor / cyclic pipeline


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


def smallest_prime_above(n: int) -> int:
    p = n + 1
    while not is_prime(p):
        p += 1
    return p


def _partitions_into_two(elements: Sequence[int]):
    """Two-block partitions of ``elements``, block with the least element first."""
    first, rest = elements[0], list(elements[1:])
    for r in range(len(rest)):
        for others in itertools.combinations(rest, r):
            a = (first,) + others
            b = tuple(x for x in rest if x not in others)
            yield a, b


def find_projection_quotient(n: int, clones: dict):
    """Subuniverse and two-class congruence on it making every listed operation a projection.

    ``clones`` maps arity to operation lists.  Returns ``(subset, classes)`` or None.
    """
    all_ops = [f for ops in clones.values() for f in ops]
    for size in range(2, n + 1):
        for subset in itertools.combinations(range(n), size):
            if closure_failure(subset, all_ops) is not None:
                continue
            restricted = [restrict(f, subset) for f in all_ops]
            pos = {x: i for i, x in enumerate(subset)}
            for a, b in _partitions_into_two(subset):
                cong = Congruence(size, (tuple(pos[x] for x in a), tuple(pos[x] for x in b)))
                if find_incompatibility(cong, restricted) is not None:
                    continue
                if all(is_projection(quotient_operation(f, cong)) for f in restricted):
                    return subset, (a, b)
    return None


def _clone_json(cc) -> dict:
    cert = None
    if cc.certificate is not None:
        cert = [format_ext(v) for v in cc.certificate.y]
    return {"members": _tables(cc.members), "excluded": _tables(cc.excluded), "certificate": cert}


def core_steps(lang: Language, budget: Budget = DEFAULT_BUDGET):
    """Restrict to the core, recording each step's witness for later checking."""
    steps = []
    while True:
        rep = core_report(lang, budget)
        if rep.is_core:
            return lang, steps
        image = sorted(set(rep.witness.table))
        steps.append({
            "operation": list(rep.witness.table),
            "weighting": weighting_to_dict(rep.weighting),
            "image": image,
        })
        lang = restrict_language(lang, image)


def replay_core_steps(lang: Language, steps) -> tuple:
    """Re-check recorded core steps; returns ``(core language, problems)``."""
    problems = []
    for i, st in enumerate(steps):
        f = Operation(lang.n, 1, tuple(st["operation"]))
        w = weighting_from_dict(st["weighting"], lang.n)
        if is_bijective(f) or w[f] <= 0 or find_violation(w, lang) is not None:
            problems.append(f"core step {i} is not a valid non-bijective positive-clone witness")
        if sorted(set(f.table)) != list(st["image"]):
            problems.append(f"core step {i} restricts to the wrong image")
        lang = restrict_language(lang, sorted(set(f.table)))
    return lang, problems


def hardness_certificate(lang: Language, budget: Budget = DEFAULT_BUDGET, cap: int | None = None) -> Verdict:
    """Search the rigid core's positive clone for cyclic operations up to ``cap``.

    ``cap`` defaults to the least prime above the domain size, the smallest
    arity at which absence of cyclic operations is decisive.
    """
    lang, steps = core_steps(lang, budget)
    base = {"core_steps": steps} if steps else {}
    n = lang.n
    if n == 1:
        return Verdict(TRACTABLE, dict(base, kind="one-element"), ("the core has a single element",))
    p = smallest_prime_above(n)
    cap = p if cap is None else cap
    gc = rigid_core(lang, budget, check_core=False)
    base["rigid_core"] = language_to_dict(gc)
    try:
        for m in range(2, cap + 1):
            w = find_cyclic_wpol(gc, m, budget)
            if w is not None:
                ev = dict(base, kind="cyclic", arity=m, weighting=weighting_to_dict(w))
                return Verdict(CONJECTURED_TRACTABLE, ev)
        if cap < p:
            return Verdict(UNKNOWN, {"kind": "budget"}, (f"searched arities up to {cap}; the decisive prime is {p}",))
        clones = {}
        for m in range(1, cap + 1):
            clones[m] = certified_positive_clone(gc, m, budget)
    except BudgetExceeded as e:
        return Verdict(UNKNOWN, {"kind": "budget"}, (f"budget exceeded: {e}",))
    found = find_projection_quotient(n, {m: list(cc.members) for m, cc in clones.items()})
    if found is None:
        return Verdict(UNKNOWN, {"kind": "budget"}, (f"no projection-only quotient visible up to arity {cap}",))
    subset, (a, b) = found
    ev = dict(
        base,
        kind="quotient",
        prime=p,
        subuniverse=list(subset),
        classes=[list(a), list(b)],
        clones={str(m): _clone_json(cc) for m, cc in clones.items()},
    )
    return Verdict(NP_HARD, ev)


# ---------------------------------------------------------------------------
# One-in-Three SAT


@dataclass(frozen=True)
class OneInThreeReduction:
    instance: Instance
    language: Language
    rho: CostFunction
    P: Fraction
    relation: tuple


def _certificate_classes(certificate):
    if isinstance(certificate, Verdict):
        certificate = certificate.evidence
    if not isinstance(certificate, dict) or certificate.get("kind") != "quotient":
        raise CertificateRequired("a projection-only quotient certificate is required")
    return [tuple(c) for c in certificate["classes"]]


def one_in_three_relation(classes) -> tuple:
    """Triples over the two classes with exactly one entry in the second class."""
    d0, d1 = classes
    elems = sorted(d0 + d1)
    second = set(d1)
    return tuple(t for t in itertools.product(elems, repeat=3) if sum(x in second for x in t) == 1)


def reduce_one_in_three(gc: Language, certificate, clauses: Sequence[Sequence[str]],
                        budget: Budget = DEFAULT_BUDGET) -> OneInThreeReduction:
    """One constraint ``rho_R(x, y, z)`` per clause; optimum = clauses * P iff 1-in-3 satisfiable."""
    classes = _certificate_classes(certificate)
    rel = one_in_three_relation(classes)
    rho, P, _ = relation_indicator(gc, rel, budget, name="one_in_three")
    variables = []
    for i, c in enumerate(clauses):
        if len(c) != 3:
            raise InputError(f"clause {i} has {len(c)} literals, expected 3")
        for v in c:
            if v not in variables:
                variables.append(v)
    cons = tuple((tuple(c), rho) for c in clauses)
    inst = Instance(gc.n, tuple(variables), cons)
    return OneInThreeReduction(inst, Language(gc.n, (rho,)), rho, P, rel)


# ---------------------------------------------------------------------------
# conservative languages


def zero_one_unaries(n: int) -> list:
    return [CostFunction(n, 1, bits, "u_" + "".join(map(str, bits))) for bits in itertools.product((0, 1), repeat=n)]


def conservative_closure(lang: Language) -> Language:
    """Add whichever {0,1}-valued unary functions are missing."""
    have = {f.table for f in lang if f.arity == 1}
    extra = [u for u in zero_one_unaries(lang.n) if u.table not in have and u.name not in lang.names]
    return lang.with_functions(extra)


def _require_conservative(lang: Language):
    have = {f.table for f in lang if f.arity == 1}
    missing = [u.table for u in zero_one_unaries(lang.n) if u.table not in have]
    if missing:
        raise ConservativityRequired(f"missing {len(missing)} of the {{0,1}}-valued unary functions")


def _improvement_checks(lang: Language, k: int):
    """Constraints ``sum_j rho(f_j(cols)) <= rhs`` keyed by their cells, strongest rhs kept."""
    n = lang.n
    best = {}
    for fn in sorted(lang.functions, key=lambda f: f.name):
        rel = feas(fn)
        for lst in itertools.product(rel, repeat=k):
            cells = tuple(lex_index(col, n) for col in zip(*lst))
            rhs = sum((fn.at(t) for t in lst), Fraction(0))
            key = (cells, fn.name)
            if key not in best or rhs < best[key][2]:
                best[key] = (cells, fn.table, rhs)
    return list(best.values())


def _multimorphism_search(lang: Language, k: int, domains, budget: Budget):
    """Yield k-tuples of k-ary tables forming a multimorphism.

    ``domains[c]`` lists the allowed joint values ``(f_1(c), ..., f_k(c))`` at cell ``c``.
    """
    n = lang.n
    cells = n**k
    by_last = [[] for _ in range(cells)]
    for cs, table, rhs in _improvement_checks(lang, k):
        by_last[max(cs)].append((cs, table, rhs))
    tables = [[0] * cells for _ in range(k)]
    choice = [0] * (cells + 1)
    nodes = 0
    c = 0
    while c >= 0:
        if c == cells:
            yield tuple(tuple(t) for t in tables)
            c -= 1
            continue
        if choice[c] >= len(domains[c]):
            choice[c] = 0
            c -= 1
            continue
        vals = domains[c][choice[c]]
        choice[c] += 1
        nodes += 1
        if nodes > budget.nodes:
            raise BudgetExceeded(f"multimorphism search exceeded {budget.nodes} nodes")
        for j in range(k):
            tables[j][c] = vals[j]
        ok = True
        for cs, ftab, rhs in by_last[c]:
            total = Fraction(0)
            for t in tables:
                idx = 0
                for x in cs:
                    idx = idx * n + t[x]
                v = ftab[idx]
                if v is INF:
                    total = INF
                    break
                total += v
            if total is INF or total > rhs:
                ok = False
                break
        if ok:
            c += 1


def _joint_values(t, k, forced=None):
    """Conservative joint values at argument tuple ``t``: each output is some entry of ``t``.

    Outputs must reproduce the multiset of ``t`` (forced by the {0,1}-valued unaries),
    so only permutations of ``t`` are listed, projections' pattern first.
    """
    if forced is not None:
        return [forced]
    seen = []
    for perm in itertools.permutations(t):
        if perm not in seen:
            seen.append(perm)
    return seen


def _pairs(n):
    return list(itertools.combinations(range(n), 2))


def _stp_pairs(sqcap: Operation, sqcup: Operation) -> list:
    out = []
    for x, y in _pairs(sqcap.n):
        if (sqcap(x, y) == sqcap(y, x) and sqcup(x, y) == sqcup(y, x)
                and sqcap(x, y) != sqcup(x, y)):
            out.append((x, y))
    return out


def _mjn_values(t):
    """Majority, majority, minority on a two-element pattern."""
    a, b, c = t
    maj = a if a in (b, c) else b
    mino = a if b == c else (b if a == c else c)
    return (maj, maj, mino)


def classify_conservative(lang: Language, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    _require_conservative(lang)
    n = lang.n
    bin_domains = [_joint_values(t, 2) for t in all_tuples(n, 2)]
    families = {}
    for sqcap_t, sqcup_t in _multimorphism_search(lang, 2, bin_domains, budget):
        sqcap, sqcup = Operation(n, 2, sqcap_t), Operation(n, 2, sqcup_t)
        fam = tuple(_stp_pairs(sqcap, sqcup))
        families.setdefault(fam, (sqcap, sqcup))
    maximal = [f for f in families if not any(set(f) < set(g) for g in families)]
    maximal.sort(key=lambda f: (-len(f), f))
    tried = []
    for fam in maximal:
        outside = set(_pairs(n)) - set(fam)
        domains = []
        for t in all_tuples(n, 3):
            forced = None
            if len(set(t)) == 1:
                forced = t
            elif len(set(t)) == 2 and tuple(sorted(set(t))) in outside:
                forced = _mjn_values(t)
            domains.append(_joint_values(t, 3, forced))
        found = next(_multimorphism_search(lang, 3, domains, budget), None)
        tried.append([list(p) for p in fam])
        if found is not None:
            sqcap, sqcup = families[fam]
            ev = {
                "kind": "conservative",
                "binary": _tables((sqcap, sqcup)),
                "ternary": [list(t) for t in found],
                "stp_pairs": [list(p) for p in fam],
            }
            return Verdict(TRACTABLE, ev)
    ev = {"kind": "conservative-exhausted", "pair_families": tried}
    return Verdict(NP_HARD, ev, ("no conservative ternary multimorphism is an MJN off the STP pairs",))


# ---------------------------------------------------------------------------
# evidence checking


def _ops(tables, n, k):
    return [Operation(n, k, tuple(t)) for t in tables]


def _check_rigid_core(ev, lang: Language, budget):
    gc = language_from_dict(ev["rigid_core"])
    expect = rigid_core(lang, budget, check_core=False)
    if gc != expect:
        raise InputError("embedded rigid core differs from the one rebuilt from the language")
    return gc


def verify_evidence(verdict: Verdict, lang: Language, budget: Budget = DEFAULT_BUDGET) -> list:
    """Re-check a verdict's evidence against ``lang``; returns a list of problems (empty = valid)."""
    try:
        return _verify(verdict, lang, budget)
    except (VCSPError, KeyError, TypeError, ValueError) as e:
        return [f"malformed evidence: {e}"]


def _verify(verdict: Verdict, lang: Language, budget: Budget) -> list:
    ev = verdict.evidence
    kind = ev.get("kind")
    problems = []
    if "core_steps" in ev:
        lang, problems = replay_core_steps(lang, ev["core_steps"])
    n = lang.n
    if kind == "multimorphism":
        ops = _ops(ev["operations"], n, len(ev["operations"]))
        if multimorphism_violation(ops, lang) is not None:
            problems.append(f"{ev['name']} is not a multimorphism")
    elif kind == "non-core":
        f = Operation(n, 1, tuple(ev["operation"]))
        w = weighting_from_dict(ev["weighting"], n)
        if is_bijective(f):
            problems.append("witness operation is bijective")
        if w[f] <= 0:
            problems.append("weighting does not put positive weight on the witness")
        if find_violation(w, lang) is not None:
            problems.append("weighting is not a weighted polymorphism")
    elif kind == "six-failures":
        names = [name for name, _ in six_multimorphisms()]
        if [f["name"] for f in ev["failures"]] != names:
            problems.append("failure list does not cover the six multimorphisms")
        for (name, ops), fail in zip(six_multimorphisms(), ev["failures"]):
            if _tables(ops) != fail["operations"]:
                problems.append(f"{name}: operation tables differ")
            if not _witness_holds(ops, lang, fail["witness"]):
                problems.append(f"{name}: witness does not violate the improvement inequality")
        members, msgs = _check_clone_listing(lang, 1, ev["core_certificate"], budget)
        problems.extend(msgs)
        if any(not is_bijective(f) for f in members):
            problems.append("core certificate lists a non-bijective unary operation")
    elif kind == "cyclic":
        gc = _check_rigid_core(ev, lang, budget)
        w = weighting_from_dict(ev["weighting"], n)
        if w.arity != ev["arity"] or not w.support:
            problems.append("cyclic weighting has the wrong arity or an empty support")
        if not all(is_idempotent(f) and is_cyclic(f) for f in w.support):
            problems.append("support contains a non-cyclic or non-idempotent operation")
        if find_violation(w, gc) is not None:
            problems.append("weighting is not a weighted polymorphism of the rigid core")
    elif kind == "quotient":
        problems.extend(_verify_quotient(ev, lang, budget))
    elif kind == "conservative":
        _require_conservative(lang)
        sqcap, sqcup = _ops(ev["binary"], n, 2)
        ternary = _ops(ev["ternary"], n, 3)
        ops = [sqcap, sqcup] + ternary
        if not all(is_conservative(f) for f in ops):
            problems.append("operations are not conservative")
        if multimorphism_violation([sqcap, sqcup], lang) is not None:
            problems.append("binary pair is not a multimorphism")
        if multimorphism_violation(ternary, lang) is not None:
            problems.append("ternary triple is not a multimorphism")
        stp = {tuple(p) for p in ev["stp_pairs"]}
        for x, y in _pairs(n):
            if (x, y) in stp:
                if (x, y) not in set(_stp_pairs(sqcap, sqcup)):
                    problems.append(f"binary pair is not an STP on {{{x},{y}}}")
            else:
                for t in itertools.product((x, y), repeat=3):
                    if len(set(t)) == 2 and tuple(f(*t) for f in ternary) != _mjn_values(t):
                        problems.append(f"ternary triple is not an MJN on {{{x},{y}}}")
                        break
    elif kind == "conservative-exhausted":
        # non-existence cannot be certified by a table check; repeat the bounded search
        again = classify_conservative(lang, budget)
        if again.status != NP_HARD:
            problems.append("repeated search found conservative multimorphisms")
    elif kind == "one-element":
        if n != 1:
            problems.append("domain has more than one element")
    elif kind == "budget":
        if verdict.status != UNKNOWN:
            problems.append("budget notes only support UNKNOWN verdicts")
    else:
        problems.append(f"unknown evidence kind {kind!r}")
    if verdict.status in (NP_HARD, TRACTABLE) and kind == "budget":
        problems.append("decisive verdicts need decisive evidence")
    return problems


def _witness_holds(ops, lang: Language, witness) -> bool:
    if witness is None:
        return False
    fn = lang[witness["function"]]
    lst = [tuple(t) for t in witness["tuples"]]
    fset = set(feas(fn))
    if len(lst) != len(ops) or any(t not in fset for t in lst):
        return False
    total = Fraction(0)
    for f in ops:
        v = fn.at(f.apply_rows(lst))
        if v is INF:
            return True
        total += v
    rhs = sum((fn.at(t) for t in lst), Fraction(0))
    return total > rhs


def _check_clone_listing(lang: Language, m: int, entry, budget: Budget):
    """Members plus certified exclusions must partition the m-ary polymorphisms.

    The certificate shows no weighted polymorphism puts positive weight on the
    excluded operations, so the members contain the whole positive clone.
    """
    n = lang.n
    problems = []
    members = _ops(entry["members"], n, m)
    excluded = _ops(entry["excluded"], n, m)
    pol = list(enumerate_polymorphisms(lang, m, budget))
    if set(members) | set(excluded) != set(pol) or set(members) & set(excluded):
        problems.append(f"arity {m}: members and excluded do not partition the polymorphisms")
    if excluded:
        y = entry["certificate"]
        if y is None:
            problems.append(f"arity {m}: exclusions lack a certificate")
        else:
            system = exclusion_system(lang, pol, excluded, budget)
            cert = FarkasCertificate(tuple(parse_ext(v) for v in y))
            if len(cert.y) != len(system.rows) or not check_certificate(system, cert):
                problems.append(f"arity {m}: exclusion certificate does not verify")
    return members, problems


def _verify_quotient(ev, lang: Language, budget: Budget) -> list:
    problems = []
    n = lang.n
    gc = _check_rigid_core(ev, lang, budget)
    p = ev["prime"]
    if not is_prime(p) or p <= n:
        problems.append(f"{p} is not a prime above {n}")
    clones = {}
    for key, entry in ev["clones"].items():
        m = int(key)
        clones[m], msgs = _check_clone_listing(gc, m, entry, budget)
        problems.extend(msgs)
    if p not in clones:
        problems.append(f"no clone listing at the prime arity {p}")
    elif any(is_idempotent(f) and is_cyclic(f) and not is_projection(f) for f in clones[p]):
        problems.append(f"arity {p} listing contains a cyclic operation")
    subset = tuple(ev["subuniverse"])
    a, b = (tuple(c) for c in ev["classes"])
    if sorted(a + b) != sorted(subset) or not a or not b:
        problems.append("classes do not split the subuniverse in two")
        return problems
    all_ops = [f for ops in clones.values() for f in ops]
    if closure_failure(subset, all_ops) is not None:
        problems.append("subuniverse is not closed under the listed operations")
        return problems
    pos = {x: i for i, x in enumerate(sorted(subset))}
    cong = Congruence(len(subset), (tuple(pos[x] for x in a), tuple(pos[x] for x in b)))
    restricted = [restrict(f, subset) for f in all_ops]
    if find_incompatibility(cong, restricted) is not None:
        problems.append("classes are not a congruence of the listed operations")
    elif not all(is_projection(quotient_operation(f, cong)) for f in restricted):
        problems.append("some quotient operation is not a projection")
    return problems
