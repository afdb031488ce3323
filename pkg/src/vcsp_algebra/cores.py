"""Cores, rigid cores and the reduction from a rigid core back to its core."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .config import DEFAULT_BUDGET, Budget
from .errors import InputError, NotACore
from .language import CostFunction, Language, constant_n, restrict_language, rho_eq
from .operations import Operation, identity, is_bijective
from .polymorphisms import enumerate_polymorphisms
from .rationals import INF, is_inf
from .vcsp import Instance, solve
from .weightings import Indicator, build_indicator, pol_plus_witness


@dataclass(frozen=True)
class CoreReport:
    is_core: bool
    witness: Optional[Operation] = None
    weighting: object = None  # weighted polymorphism putting positive weight on the witness
    chain: tuple = ()  # shrinking domains in original labels, filled by compute_core

    def __post_init__(self):
        if self.is_core == (self.witness is not None):
            raise InputError("a core report has a witness exactly when it is not a core")


def core_report(lang: Language, budget: Budget = DEFAULT_BUDGET) -> CoreReport:
    """Is every unary positive-clone member bijective?  Witness: least non-bijective member."""
    pol = enumerate_polymorphisms(lang, 1, budget)
    for f in pol:  # lexicographic table order
        if is_bijective(f):
            continue
        w = pol_plus_witness(lang, f, budget, pol)
        if w is not None:
            return CoreReport(False, f, w)
    return CoreReport(True)


def compute_core(lang: Language, budget: Budget = DEFAULT_BUDGET):
    """Restrict to images of non-bijective witnesses until a core remains.

    Returns ``(core language, surviving elements, chain of domains)``; elements
    are labels of the input domain, the core's domain re-indexes them increasingly.
    """
    current = lang
    labels = list(range(lang.n))
    chain = [tuple(labels)]
    while True:
        rep = core_report(current, budget)
        if rep.is_core:
            return current, tuple(labels), tuple(chain)
        image = sorted(set(rep.witness.table))
        current = restrict_language(current, image)
        labels = [labels[i] for i in image]
        chain.append(tuple(labels))


def restrict_instance(instance: Instance, core_lang: Language) -> Instance:
    """Same instance with every function swapped for its namesake in ``core_lang``."""
    cons = tuple((scope, core_lang[f.name]) for scope, f in instance.constraints)
    return Instance(core_lang.n, instance.variables, cons)


def _fresh_name(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def constant_names(lang: Language) -> list:
    taken = set(lang.names)
    names = []
    for i in range(lang.n):
        nm = _fresh_name(f"N_{i}", taken)
        taken.add(nm)
        names.append(nm)
    return names


def rigid_core(lang: Language, budget: Budget = DEFAULT_BUDGET, check_core: bool = True) -> Language:
    """Add the crisp constants ``N_i``; the result has the identity as its only unary polymorphism."""
    if check_core and not core_report(lang, budget).is_core:
        raise NotACore("rigid cores are built from core languages only")
    names = constant_names(lang)
    out = lang.with_functions(constant_n(lang.n, i, names[i]) for i in range(lang.n))
    pol1 = list(enumerate_polymorphisms(out, 1, budget))
    if pol1 != [identity(lang.n)]:
        raise NotACore("constants failed to pin the unary polymorphisms")
    return out


@dataclass(frozen=True)
class RigidReduction:
    """Instance over the core language plus equality and the unary indicator ``N``.

    ``m`` copies of ``N`` on the fresh variables penalise every non-positive-clone
    relabelling by more than the spread ``bound`` of the remaining constraints.
    """

    instance: Instance
    language: Language
    indicator: Indicator
    N: CostFunction
    P: Fraction
    Q: object  # Fraction, or None when Pol_1 = Pol+_1
    bound: Fraction
    m: int
    fresh: tuple
    source_vars: tuple

    def recover(self, budget: Budget = DEFAULT_BUDGET):
        """Optimum of the rigid-core instance and an optimal assignment (or ``(INF, None)``)."""
        value, s = solve(self.instance, budget)
        if is_inf(value):
            return INF, None
        g = tuple(s[v] for v in self.fresh)
        if self.N.at(g) != self.P:
            return INF, None
        # g is a positive-clone bijection; pull the assignment back through its inverse
        inv = [0] * len(g)
        for x, y in enumerate(g):
            inv[y] = x
        assignment = {v: inv[s[v]] for v in self.source_vars}
        return value - self.m * self.P, assignment


def _spread(fn: CostFunction) -> Fraction:
    vals = [v for v in fn.table if not is_inf(v)]
    if not vals:
        return Fraction(0)
    return max(vals) - min(vals)


def reduce_rigid_instance(lang: Language, rigid: Language, instance: Instance,
                          budget: Budget = DEFAULT_BUDGET, indicator: Indicator | None = None) -> RigidReduction:
    """Rewrite an instance over ``rigid`` (= lang plus constants) into one over ``lang``."""
    n = lang.n
    if rigid.n != n or instance.n != n:
        raise InputError("language, rigid core and instance must share a domain")
    if indicator is None:
        indicator = build_indicator(lang, 1, budget)  # raises CoreRequired
    consts = {}
    for i in range(n):
        target = constant_n(n, i)
        for f in rigid:
            if f.name not in lang.names and f.same_table(target):
                consts[f.name] = i
    taken = set(rigid.names) | set(instance.variables)
    fresh = []
    for i in range(n):
        v = _fresh_name(f"v_{i}", taken)
        taken.add(v)
        fresh.append(v)
    eq_name = _fresh_name("eq", set(rigid.names) | {"N"})
    eq = rho_eq(n).renamed(eq_name)
    N = indicator.cost_function(_fresh_name("N", set(rigid.names) | {eq_name}), budget)

    cons = []
    for scope, f in instance.constraints:
        if f.name in consts:
            cons.append(((scope[0], fresh[consts[f.name]]), eq))
        elif f.name in lang.names:
            cons.append((scope, lang[f.name]))
        else:
            raise InputError(f"constraint uses {f.name!r}, which is neither in the core nor a constant")

    # total spread of the remaining constraints; with non-negative costs this is
    # at most the sum of all finite costs
    bound = sum((_spread(f) for _, f in cons), Fraction(0))
    P = indicator.P
    plus = set(indicator.pol_plus)
    outside = [f for f in indicator.pol if f not in plus]
    if outside:
        Q = min(N.at(f.table) for f in outside)
        gap = Q - P
        m = max(1, math.floor(bound / gap) + 1)
    else:
        Q = None
        m = 1
    for _ in range(m):
        cons.append((tuple(fresh), N))
    out_lang = lang.with_functions([eq, N])
    inst = Instance(n, tuple(instance.variables) + tuple(fresh), tuple(cons))
    return RigidReduction(inst, out_lang, indicator, N, P, Q, bound, m, tuple(fresh), tuple(instance.variables))
