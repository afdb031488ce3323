"""VCSP instances: exact brute-force solving and expressibility.

Also hosts the generating steps of weighted relational clones (non-negative
scaling, adding constants, addition with explicit argument maps, and
minimisation over coordinates).
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .config import DEFAULT_BUDGET, Budget
from .errors import BudgetExceeded, InputError, ParseError
from .language import CostFunction, Language, load_language
from .operations import all_tuples
from .rationals import INF, ExtendedRational, scale


@dataclass(frozen=True)
class Instance:
    n: int
    variables: tuple
    constraints: tuple  # of (scope tuple, CostFunction)

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise InputError("duplicate variable names")
        vs = set(variables)
        cons = []
        for i, (scope, fn) in enumerate(self.constraints):
            scope = tuple(scope)
            if len(scope) != fn.arity:
                raise InputError(f"scope length {len(scope)} != arity {fn.arity}", f"constraints[{i}]")
            if fn.n != self.n:
                raise InputError("constraint function over a different domain", f"constraints[{i}]")
            for v in scope:
                if v not in vs:
                    raise InputError(f"unknown variable {v!r}", f"constraints[{i}]")
            cons.append((scope, fn))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", tuple(cons))

    def add(self, scope, fn) -> "Instance":
        return Instance(self.n, self.variables, self.constraints + ((tuple(scope), fn),))

    def functions(self):
        out = {}
        for _, fn in self.constraints:
            out.setdefault(fn.name, fn)
        return out


def cost(instance: Instance, assignment) -> ExtendedRational:
    """Exact cost of a total assignment (a mapping or a sequence in variable order)."""
    if not isinstance(assignment, dict):
        assignment = dict(zip(instance.variables, assignment))
    missing = [v for v in instance.variables if v not in assignment]
    if missing:
        raise InputError(f"assignment is not total; missing {missing}")
    total = Fraction(0)
    for scope, fn in instance.constraints:
        val = fn.at([assignment[v] for v in scope])
        if val is INF:
            return INF
        total += val
    return total


def _check_budget(instance: Instance, budget: Budget):
    count = instance.n ** len(instance.variables)
    if count > budget.assignments:
        raise BudgetExceeded(
            f"{instance.n}^{len(instance.variables)} = {count} assignments exceeds budget {budget.assignments}"
        )


def _compiled(instance: Instance):
    pos = {v: i for i, v in enumerate(instance.variables)}
    n = instance.n
    out = []
    for scope, fn in instance.constraints:
        idx = [pos[v] for v in scope]
        out.append((idx, fn.table, n))
    return out


def _iter_costs(instance: Instance):
    """Yield (assignment tuple, cost) in lexicographic order of assignments."""
    comp = _compiled(instance)
    n = instance.n
    for s in itertools.product(range(n), repeat=len(instance.variables)):
        total = Fraction(0)
        for idx, table, _ in comp:
            k = 0
            for i in idx:
                k = k * n + s[i]
            v = table[k]
            if v is INF:
                total = INF
                break
            total += v
        yield s, total


def solve(instance: Instance, budget: Budget = DEFAULT_BUDGET):
    """Optimal cost and the lexicographically least optimal assignment."""
    _check_budget(instance, budget)
    best = INF
    best_s = None
    for s, c in _iter_costs(instance):
        if best_s is None or c < best:
            best, best_s = c, s
    return best, dict(zip(instance.variables, best_s))


def all_optimal(instance: Instance, budget: Budget = DEFAULT_BUDGET):
    _check_budget(instance, budget)
    best = INF
    opt = []
    for s, c in _iter_costs(instance):
        if c < best:
            best, opt = c, [s]
        elif c == best:
            opt.append(s)
    return best, [dict(zip(instance.variables, s)) for s in opt]


def express(instance: Instance, projection_list: Sequence[str], name: str = "",
            budget: Budget = DEFAULT_BUDGET) -> CostFunction:
    """Cost function expressed by ``instance`` on the listed (possibly repeated) variables."""
    projection_list = tuple(projection_list)
    if not projection_list:
        raise InputError("projection list must be non-empty")
    pos = {v: i for i, v in enumerate(instance.variables)}
    for v in projection_list:
        if v not in pos:
            raise InputError(f"unknown variable {v!r} in projection list")
    _check_budget(instance, budget)
    n = instance.n
    r = len(projection_list)
    table = [INF] * n**r
    idx = [pos[v] for v in projection_list]
    for s, c in _iter_costs(instance):
        k = 0
        for i in idx:
            k = k * n + s[i]
        if c < table[k]:
            table[k] = c
    return CostFunction(n, r, tuple(table), name)


# ---------------------------------------------------------------------------
# weighted relational clone steps


def scale_function(f: CostFunction, c, name: str = "") -> CostFunction:
    """Non-negative scaling; scaling by 0 gives the constant-0 function."""
    return CostFunction(f.n, f.arity, tuple(scale(c, v) for v in f.table), name or f.name)


def add_constant(f: CostFunction, c, name: str = "") -> CostFunction:
    c = Fraction(c)
    return CostFunction(f.n, f.arity, tuple(v if v is INF else v + c for v in f.table), name or f.name)


def add_functions(f: CostFunction, g: CostFunction, arity: int, f_args: Sequence[int],
                  g_args: Sequence[int], name: str = "") -> CostFunction:
    """``h(x_0..x_{arity-1}) = f(x[f_args]) + g(x[g_args])``."""
    if f.n != g.n:
        raise InputError("functions over different domains")
    if len(f_args) != f.arity or len(g_args) != g.arity:
        raise InputError("argument maps must match the arities")
    for i in list(f_args) + list(g_args):
        if not 0 <= i < arity:
            raise InputError(f"argument index {i} out of range for arity {arity}")
    table = []
    for t in all_tuples(f.n, arity):
        table.append(f.at([t[i] for i in f_args]) + g.at([t[i] for i in g_args]))
    return CostFunction(f.n, arity, tuple(table), name)


def minimise(f: CostFunction, coordinates: Sequence[int], name: str = "") -> CostFunction:
    """Minimise away the listed coordinates (0-based)."""
    drop = set(coordinates)
    if any(not 0 <= i < f.arity for i in drop):
        raise InputError("coordinate out of range")
    keep = [i for i in range(f.arity) if i not in drop]
    if not keep:
        raise InputError("cannot minimise over every coordinate (nullary result)")
    r = len(keep)
    table = [INF] * f.n**r
    for t, v in zip(all_tuples(f.n, f.arity), f.table):
        k = 0
        for i in keep:
            k = k * f.n + t[i]
        if v < table[k]:
            table[k] = v
    return CostFunction(f.n, r, tuple(table), name or f.name)


def wrelclo_step(f: CostFunction, op: str, arg=None, **kw) -> CostFunction:
    """Dispatch one closure step: ``scale``, ``add_constant``, ``add`` or ``minimise``."""
    if op == "scale":
        return scale_function(f, arg)
    if op == "add_constant":
        return add_constant(f, arg)
    if op == "add":
        return add_functions(f, arg, kw["arity"], kw["f_args"], kw["g_args"])
    if op == "minimise":
        return minimise(f, arg)
    raise InputError(f"unknown closure step {op!r}")


# ---------------------------------------------------------------------------
# instance files

_INST_KEYS = {"domain_size", "language", "variables", "constraints"}


def instance_to_dict(instance: Instance, language_ref: str) -> dict:
    return {
        "domain_size": instance.n,
        "language": language_ref,
        "variables": list(instance.variables),
        "constraints": [
            {"scope": list(scope), "function_name": fn.name} for scope, fn in instance.constraints
        ],
    }


def serialize_instance(instance: Instance, language_ref: str) -> str:
    return json.dumps(instance_to_dict(instance, language_ref), indent=2) + "\n"


def instance_from_dict(data, lang: Language, where="$") -> Instance:
    if not isinstance(data, dict):
        raise ParseError("instance must be an object", where)
    unknown = set(data) - _INST_KEYS
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}", where)
    missing = _INST_KEYS - set(data)
    if missing:
        raise ParseError(f"missing field(s) {sorted(missing)}", where)
    if data["domain_size"] != lang.n:
        raise ParseError(
            f"domain_size {data['domain_size']} differs from the language's {lang.n}", f"{where}.domain_size"
        )
    variables = data["variables"]
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ParseError("variables must be a list of strings", f"{where}.variables")
    cons = []
    for i, c in enumerate(data["constraints"]):
        loc = f"{where}.constraints[{i}]"
        if not isinstance(c, dict) or set(c) != {"scope", "function_name"}:
            raise ParseError("constraint must have exactly 'scope' and 'function_name'", loc)
        try:
            fn = lang[c["function_name"]]
        except KeyError:
            raise ParseError(f"unknown function {c['function_name']!r}", f"{loc}.function_name") from None
        if not isinstance(c["scope"], list):
            raise ParseError("scope must be a list", f"{loc}.scope")
        cons.append((tuple(c["scope"]), fn))
    try:
        return Instance(lang.n, tuple(variables), tuple(cons))
    except InputError as e:
        raise ParseError(str(e), where) from None


def load_instance(path):
    """Load an instance file and the language file it references.

    Returns ``(instance, language, language_path)``.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", f"{path}: line {e.lineno}") from None
    if not isinstance(data, dict) or not isinstance(data.get("language"), str):
        raise ParseError("instance needs a 'language' file reference", str(path))
    lang_path = os.path.join(os.path.dirname(os.path.abspath(path)), data["language"])
    lang = load_language(lang_path)
    try:
        inst = instance_from_dict(data, lang)
    except ParseError as e:
        raise ParseError(str(e), str(path)) from None
    return inst, lang, lang_path
