"""Weightings, weighted polymorphisms and the LPs built on them.

All LPs here range over weight vectors ``omega`` indexed by the m-ary
polymorphisms of a language.  Non-projections get a non-negative variable,
projections a free one (split into two non-negative variables) unless the
caller asks for non-positive projection weights.  Every improvement inequality
``sum_g omega(g) * rho(g(x_1..x_m)) <= 0`` becomes one row; rows are emitted in
a fixed order (functions sorted by name, tuple lists lexicographically).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .config import DEFAULT_BUDGET, Budget
from .errors import (
    BudgetExceeded,
    CoreRequired,
    ImproperSuperposition,
    InputError,
    InternalContradiction,
    NotAPolymorphism,
    ParseError,
)
from .language import CostFunction, Language, feas, feasibility_function
from .lp import FarkasCertificate, Kind, LinearSystem, Row, Solution, solve_farkas
from .operations import (
    Operation,
    all_tuples,
    compose,
    is_bijective,
    is_cyclic,
    is_idempotent,
    is_projection,
    lex_index,
    projections,
)
from .polymorphisms import OperationSet, compatible_with, enumerate_polymorphisms, is_polymorphism
from .rationals import INF, format_ext, parse_ext, scale
from .vcsp import Instance, cost, express


@dataclass(frozen=True)
class Weighting:
    """A k-ary weighting: rational weights summing to 0, negative only on projections.

    Zero weights are not stored.
    """

    n: int
    arity: int
    entries: tuple = ()  # ((Operation, Fraction), ...) sorted by table

    def __init__(self, n: int, arity: int, weights: Mapping[Operation, Fraction] | Iterable = ()):
        if isinstance(weights, Mapping):
            items = weights.items()
        else:
            items = weights
        acc: dict = {}
        for f, w in items:
            if f.n != n or f.arity != arity:
                raise InputError("weighting mixes domains or arities")
            acc[f] = acc.get(f, Fraction(0)) + Fraction(w)
        entries = tuple(sorted(((f, w) for f, w in acc.items() if w != 0), key=lambda e: e[0].table))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "entries", entries)
        if sum((w for _, w in entries), Fraction(0)) != 0:
            raise InputError("weights of a weighting must sum to 0")
        for f, w in entries:
            if w < 0 and not is_projection(f):
                raise InputError(f"negative weight {w} on a non-projection {f}")

    @classmethod
    def zero(cls, n, arity):
        return cls(n, arity, {})

    @property
    def weights(self) -> dict:
        return dict(self.entries)

    def __getitem__(self, f: Operation) -> Fraction:
        return self.weights.get(f, Fraction(0))

    @property
    def support(self) -> tuple:
        return tuple(f for f, w in self.entries if w > 0)

    def is_zero(self) -> bool:
        return not self.entries

    def scaled(self, c) -> "Weighting":
        c = Fraction(c)
        if c < 0:
            raise InputError("weightings scale by non-negative constants only")
        return Weighting(self.n, self.arity, {f: c * w for f, w in self.entries})

    def __add__(self, other: "Weighting") -> "Weighting":
        if (self.n, self.arity) != (other.n, other.arity):
            raise InputError("can only add weightings of equal arity")
        acc = self.weights
        for f, w in other.entries:
            acc[f] = acc.get(f, Fraction(0)) + w
        return Weighting(self.n, self.arity, acc)

    def normalized(self) -> "Weighting":
        """Scale so the most negative weight is -1 (no-op for the zero weighting)."""
        neg = [w for _, w in self.entries if w < 0]
        if not neg:
            return self
        return self.scaled(Fraction(-1) / min(neg))

    def is_idempotent(self) -> bool:
        return all(is_idempotent(f) for f in self.support)

    def is_cyclic(self) -> bool:
        sup = self.support
        return bool(sup) and all(is_cyclic(f) for f in sup)


def multimorphism(ops: Sequence[Operation]) -> Weighting:
    """The weighting (1/k)(sum f_i - sum pi_i) of the tuple <f_1, ..., f_k>."""
    k = len(ops)
    if k == 0:
        raise InputError("a multimorphism needs at least one operation")
    n = ops[0].n
    acc: dict = {}
    for f in ops:
        if f.arity != k:
            raise InputError(f"multimorphism operations must all be {k}-ary")
        acc[f] = acc.get(f, Fraction(0)) + Fraction(1, k)
    for p in projections(n, k):
        acc[p] = acc.get(p, Fraction(0)) - Fraction(1, k)
    return Weighting(n, k, acc)


# ---------------------------------------------------------------------------
# improvement


def _function_order(lang: Language):
    return sorted(lang.functions, key=lambda f: f.name)


def find_violation(omega: Weighting, lang: Language, check_support: bool = True):
    """First tuple list on which ``omega`` fails to improve some function, or None.

    The witness is ``{"function": name, "tuples": [...], "value": sum}`` where
    ``value`` is the weighted sum (``INF`` if a positively weighted operation
    leaves the feasibility relation).
    """
    if omega.n != lang.n:
        raise InputError("weighting and language are over different domains")
    for f, _ in omega.entries if check_support else ():
        if not is_polymorphism(f, lang):
            raise NotAPolymorphism(f"{f} is not a polymorphism of the language")
    k = omega.arity
    for fn in _function_order(lang):
        rel = feas(fn)
        for lst in itertools.product(rel, repeat=k):
            total = Fraction(0)
            for f, w in omega.entries:
                v = fn.at(f.apply_rows(lst))
                if v is INF:
                    total = INF
                    break
                total += w * v
            if total is INF or total > 0:
                return {"function": fn.name, "tuples": [list(t) for t in lst], "value": total}
    return None


def is_weighted_polymorphism(omega: Weighting, lang: Language) -> bool:
    return find_violation(omega, lang) is None


def superpose(omega: Weighting, gs: Sequence[Operation]) -> Weighting:
    """``omega[g_1, ..., g_k]``; raises ImproperSuperposition when the result is not a weighting."""
    if len(gs) != omega.arity:
        raise InputError(f"need {omega.arity} inner operations, got {len(gs)}")
    if not gs:
        raise InputError("empty superposition")
    ell = gs[0].arity
    acc: dict = {}
    for f, w in omega.entries:
        h = compose(f, gs)
        acc[h] = acc.get(h, Fraction(0)) + w
    bad = {f: w for f, w in acc.items() if w < 0 and not is_projection(f)}
    if bad:
        raise ImproperSuperposition(
            f"superposition puts negative weight on {len(bad)} non-projection(s)", acc
        )
    return Weighting(omega.n, ell, acc)


# ---------------------------------------------------------------------------
# LP construction


def improvement_coefficients(lang: Language, ops: Sequence[Operation]):
    """Yield ``(function, tuple list, [rho(g(list)) for g in ops])`` in canonical order."""
    n = lang.n
    if not ops:
        return
    m = ops[0].arity
    tables = [g.table for g in ops]
    for fn in _function_order(lang):
        rel = feas(fn)
        ftab = fn.table
        for lst in itertools.product(rel, repeat=m):
            cells = [lex_index(col, n) for col in zip(*lst)]
            coeffs = []
            for t in tables:
                k = 0
                for c in cells:
                    k = k * n + t[c]
                coeffs.append(ftab[k])
            yield fn, lst, coeffs


@dataclass
class _WeightLP:
    """Variable layout of a weighting LP over a fixed operation list."""

    ops: list
    columns: list = field(default_factory=list)  # per op: list of (var, sign)
    num_vars: int = 0

    @classmethod
    def build(cls, ops, allowed_positive, projection_mode="free", representative=None):
        """``representative`` maps each op to the op whose columns it shares."""
        lp = cls(list(ops))
        shared = {}
        for g in lp.ops:
            rep = g if representative is None else representative[g]
            if rep in shared:
                lp.columns.append(shared[rep])
                continue
            cols = []
            if is_projection(g):
                if projection_mode == "free":
                    cols = [(lp.num_vars, 1), (lp.num_vars + 1, -1)]
                    lp.num_vars += 2
                else:  # non-positive
                    cols = [(lp.num_vars, -1)]
                    lp.num_vars += 1
            elif g in allowed_positive:
                cols = [(lp.num_vars, 1)]
                lp.num_vars += 1
            shared[rep] = cols
            lp.columns.append(cols)
        return lp

    def row(self, op_coeffs, rhs, kind):
        vec = [Fraction(0)] * self.num_vars
        for cols, c in zip(self.columns, op_coeffs):
            if c:
                for v, s in cols:
                    vec[v] += s * c
        return Row(vec, rhs, kind)

    def omega(self, z, n, arity) -> Weighting:
        acc = {}
        for g, cols in zip(self.ops, self.columns):
            w = sum((s * z[v] for v, s in cols), Fraction(0))
            if w:
                acc[g] = w
        return Weighting(n, arity, acc)


def _weighting_rows(lang: Language, lp: _WeightLP, budget: Budget):
    """Sum-to-zero row plus reduced, de-duplicated improvement rows."""
    k = len(lp.ops)
    rows = [lp.row([1] * k, 0, Kind.EQ)]
    active = [bool(cols) for cols in lp.columns]
    seen = set()
    count = 0
    for fn, lst, coeffs in improvement_coefficients(lang, lp.ops):
        count += 1
        if count > budget.lp_rows:
            raise BudgetExceeded(f"more than {budget.lp_rows} improvement rows")
        vals = [c for c, a in zip(coeffs, active) if a]
        if any(v is INF for v in vals):
            # only reachable for non-polymorphisms, which are never columns
            raise NotAPolymorphism("operation maps a feasible tuple list outside Feas")
        if not vals:
            continue
        # sum(omega) = 0 lets us subtract the most common coefficient
        kappa = Counter(vals).most_common(1)[0][0]
        shifted = tuple(Fraction(0) if not a else kappa - c for c, a in zip(coeffs, active))
        if not any(shifted):
            continue
        if shifted in seen:
            continue
        seen.add(shifted)
        rows.append(lp.row(shifted, 0, Kind.GEQ))
    return rows


def _polymorphisms(lang, m, budget, pol=None):
    if pol is None:
        pol = enumerate_polymorphisms(lang, m, budget)
    return list(pol)


def _weighting_system(lang, ops, allowed, extra, budget, projection_mode="free", representative=None):
    lp = _WeightLP.build(ops, allowed, projection_mode, representative)
    rows = _weighting_rows(lang, lp, budget) + list(extra(lp))
    return lp, LinearSystem(lp.num_vars, rows, has_free_constant=False)


def _solve_weighting_lp(lang, ops, allowed, extra, budget, projection_mode="free", with_result=False,
                        representative=None):
    """Feasibility of the weighting LP plus ``extra(lp) -> rows``; a Weighting or None."""
    lp, system = _weighting_system(lang, ops, allowed, extra, budget, projection_mode, representative)
    res = solve_farkas(system)
    w = lp.omega(res.z, lang.n, ops[0].arity) if isinstance(res, Solution) else None
    if with_result:
        return w, res
    return w


def permute_arguments(g: Operation, sigma: Sequence[int]) -> Operation:
    """``x -> g(x[sigma[0]], ..., x[sigma[m-1]])``."""
    n = g.n
    table = []
    for t in all_tuples(n, g.arity):
        table.append(g.table[lex_index([t[i] for i in sigma], n)])
    return Operation(n, g.arity, tuple(table))


def stabilizer_orbits(f: Operation, ops: Sequence[Operation]) -> dict:
    """Map each op to the least op in its orbit under argument permutations fixing ``f``.

    ``ops`` must be closed under permuting arguments, as polymorphism sets are.
    """
    group = [s for s in itertools.permutations(range(f.arity)) if permute_arguments(f, s) == f]
    rep = {}
    for g in ops:
        if g in rep:
            continue
        orbit = {permute_arguments(g, s) for s in group}
        least = min(orbit, key=lambda h: h.table)
        for h in orbit:
            rep[h] = least
    return rep


def pol_plus_witness(lang: Language, f: Operation, budget: Budget = DEFAULT_BUDGET, pol=None):
    """A weighted polymorphism giving ``f`` positive weight, or None.

    Projections belong to the positive clone by definition; their witness is
    the zero weighting.
    """
    if f.n != lang.n:
        raise InputError("operation and language are over different domains")
    if is_projection(f):
        return Weighting.zero(lang.n, f.arity)
    ops = _polymorphisms(lang, f.arity, budget, pol)
    if f not in set(ops):
        raise NotAPolymorphism(f"{f} is not a polymorphism of the language")
    allowed = {g for g in ops if not is_projection(g)}
    idx = ops.index(f)

    def extra(lp):
        c = [0] * len(ops)
        c[idx] = 1
        return [lp.row(c, 1, Kind.GEQ)]

    # The LP is invariant under permuting arguments, so averaging a solution
    # over the stabiliser of f keeps it feasible: orbit-constant weights suffice.
    rep = stabilizer_orbits(f, ops)
    w = _solve_weighting_lp(lang, ops, allowed, extra, budget, representative=rep)
    return None if w is None else w.normalized()


def pol_plus_membership(lang: Language, f: Operation, budget: Budget = DEFAULT_BUDGET, pol=None) -> bool:
    return pol_plus_witness(lang, f, budget, pol) is not None


@dataclass(frozen=True)
class CertifiedClone:
    """Positive-clone members with witnesses, plus a Farkas certificate that
    no weighted polymorphism puts positive weight on the remaining polymorphisms."""

    members: OperationSet
    witnesses: tuple
    excluded: tuple  # polymorphisms outside the positive clone
    certificate: object  # FarkasCertificate, or None when nothing is excluded


def _exclusion_extra(ops, pending):
    pend = set(pending)

    def extra(lp):
        return [lp.row([1 if g in pend else 0 for g in ops], 1, Kind.GEQ)]

    return extra


def exclusion_system(lang: Language, ops: Sequence[Operation], excluded: Iterable[Operation],
                     budget: Budget = DEFAULT_BUDGET) -> LinearSystem:
    """LP asking for a weighted polymorphism with total weight >= 1 on ``excluded``."""
    ops = list(ops)
    allowed = {g for g in ops if not is_projection(g)}
    _, system = _weighting_system(lang, ops, allowed, _exclusion_extra(ops, excluded), budget)
    return system


def certified_positive_clone(lang: Language, m: int, budget: Budget = DEFAULT_BUDGET, pol=None) -> CertifiedClone:
    """The m-ary part of the positive clone.

    Repeatedly asks for a weighted polymorphism putting total weight >= 1 on
    the not-yet-confirmed non-projections; each answer's support joins the
    clone.  Stops when no such weighting exists, keeping the infeasibility
    certificate.
    """
    ops = _polymorphisms(lang, m, budget, pol)
    members = set(projections(lang.n, m))
    witnesses = []
    allowed = {g for g in ops if not is_projection(g)}
    pending = [g for g in ops if g in allowed]
    certificate = None
    while pending:
        w, res = _solve_weighting_lp(lang, ops, allowed, _exclusion_extra(ops, pending), budget,
                                     with_result=True)
        if w is None:
            certificate = res
            break
        w = w.normalized()
        witnesses.append(w)
        new = set(w.support) & set(pending)
        if not new:
            raise InternalContradiction("positive-clone LP returned no new support")
        members |= new
        pending = [g for g in pending if g not in new]
    return CertifiedClone(OperationSet(lang.n, m, tuple(members)), tuple(witnesses), tuple(pending), certificate)


def positive_clone(lang: Language, m: int, budget: Budget = DEFAULT_BUDGET, pol=None,
                   with_witnesses: bool = False):
    """The m-ary part of the positive clone (projections included)."""
    cc = certified_positive_clone(lang, m, budget, pol)
    if with_witnesses:
        return cc.members, list(cc.witnesses)
    return cc.members


def find_cyclic_wpol(lang: Language, m: int, budget: Budget = DEFAULT_BUDGET, pol=None):
    """A weighted polymorphism supported on idempotent cyclic operations, or None."""
    ops = _polymorphisms(lang, m, budget, pol)
    cands = [g for g in ops if not is_projection(g) and is_idempotent(g) and is_cyclic(g)]
    if not cands:
        return None
    cset = set(cands)

    def extra(lp):
        return [lp.row([1 if g in cset else 0 for g in ops], 1, Kind.EQ)]

    # projections get non-positive weight so the support stays inside cands
    w = _solve_weighting_lp(lang, ops, cset, extra, budget, projection_mode="nonpositive")
    return None if w is None else w.normalized()


# ---------------------------------------------------------------------------
# indicator cost functions


def is_core(lang: Language, budget: Budget = DEFAULT_BUDGET) -> bool:
    return all(is_bijective(f) for f in positive_clone(lang, 1, budget))


def tuple_var(t: Sequence[int]) -> str:
    return "x" + "_".join(str(v) for v in t)


@dataclass(frozen=True)
class Indicator:
    """Instance over variables ``D^m`` whose cost separates Pol+ from the rest."""

    instance: Instance
    P: Fraction
    arity: int
    pol: OperationSet
    pol_plus: OperationSet
    z: tuple  # LP weights, one per (function, tuple list) term

    def value(self, f: Operation):
        return cost(self.instance, f.table)

    def cost_function(self, name="indicator", budget: Budget = DEFAULT_BUDGET) -> CostFunction:
        return express(self.instance, self.instance.variables, name, budget)


def build_indicator(lang: Language, m: int, budget: Budget = DEFAULT_BUDGET,
                    check_core: bool = True) -> Indicator:
    """Cost function over m-ary operations: >= P, finite on Pol, = P exactly on Pol+."""
    if check_core and not is_core(lang, budget):
        raise CoreRequired("the indicator construction needs a core language")
    n = lang.n
    pol = enumerate_polymorphisms(lang, m, budget)
    pol_plus = positive_clone(lang, m, budget, pol)
    plus = set(pol_plus)

    terms = []  # (function, tuple of b-vectors)
    for fn in _function_order(lang):
        rel = feas(fn)
        for lst in itertools.product(rel, repeat=m):
            terms.append((fn, tuple(zip(*lst))))
    if len(terms) > budget.lp_rows:
        raise BudgetExceeded(f"{len(terms)} indicator terms exceed budget {budget.lp_rows}")

    rows = []
    for f in pol:
        coeffs = []
        for fn, bs in terms:
            coeffs.append(fn.at([f(*b) for b in bs]))
        if f in plus:
            rows.append(Row(coeffs, 0, Kind.EQ))
        else:
            rows.append(Row(coeffs, 1, Kind.GEQ))
    res = solve_farkas(LinearSystem(len(terms), rows, has_free_constant=True))
    if isinstance(res, FarkasCertificate):
        raise InternalContradiction(
            "indicator LP is infeasible; its certificate would be a weighted polymorphism "
            "contradicting the computed positive clone"
        )

    variables = tuple(tuple_var(t) for t in all_tuples(n, m))
    cons = []
    for (fn, bs), zval in zip(terms, res.z):
        scope = tuple(tuple_var(b) for b in bs)
        if zval == 0:
            g = feasibility_function(fn, f"feas({fn.name})")
        else:
            g = CostFunction(n, fn.arity, tuple(scale(zval, v) for v in fn.table), f"{fn.name}*{zval}")
        cons.append((scope, g))
    inst = Instance(n, variables, tuple(cons))
    return Indicator(inst, res.C, m, pol, pol_plus, tuple(res.z))


def relation_indicator(lang: Language, relation: Iterable[Sequence[int]], budget: Budget = DEFAULT_BUDGET,
                       name: str = "rho_R", check_core: bool = True):
    """Cost function ``rho_R >= P`` with equality exactly on ``relation``.

    Returns ``(rho_R, P, indicator)``.
    """
    rel = sorted({tuple(t) for t in relation})
    if not rel:
        raise InputError("relation must be non-empty")
    r = len(rel[0])
    if r < 1 or any(len(t) != r for t in rel):
        raise InputError("relation tuples must share a positive arity")
    if any(v < 0 or v >= lang.n for t in rel for v in t):
        raise InputError("relation entries outside the domain")
    m = len(rel)
    ind = build_indicator(lang, m, budget, check_core=check_core)
    if not compatible_with(rel, ind.pol_plus):
        raise InputError(f"relation is not compatible with the {m}-ary positive clone")
    coords = [tuple_var(tuple(x[i] for x in rel)) for i in range(r)]
    rho = express(ind.instance, coords, name, budget)
    return rho, ind.P, ind


def idempotent_part(ops: Iterable[Operation]) -> tuple:
    return tuple(sorted((f for f in ops if is_idempotent(f)), key=lambda o: o.table))


# ---------------------------------------------------------------------------
# serialization


def weighting_to_dict(omega: Weighting) -> dict:
    return {
        "arity": omega.arity,
        "entries": [{"operation_table": list(f.table), "weight": format_ext(w)} for f, w in omega.entries],
    }


def weighting_from_dict(data, n: int, where="$") -> Weighting:
    if not isinstance(data, dict) or set(data) != {"arity", "entries"}:
        raise ParseError("weighting must have exactly 'arity' and 'entries'", where)
    k = data["arity"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ParseError("arity must be a positive integer", f"{where}.arity")
    acc = []
    for i, e in enumerate(data["entries"]):
        loc = f"{where}.entries[{i}]"
        if not isinstance(e, dict) or set(e) != {"operation_table", "weight"}:
            raise ParseError("entry must have exactly 'operation_table' and 'weight'", loc)
        w = parse_ext(e["weight"], f"{loc}.weight")
        if w is INF:
            raise ParseError("weights must be finite", f"{loc}.weight")
        try:
            acc.append((Operation(n, k, tuple(e["operation_table"])), w))
        except (InputError, TypeError, ValueError) as err:
            raise ParseError(str(err), f"{loc}.operation_table") from None
    try:
        return Weighting(n, k, acc)
    except InputError as err:
        raise ParseError(str(err), where) from None
