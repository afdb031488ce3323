"""Cost functions, valued constraint languages and their JSON file format.

A language file looks like::

    {
      "domain_size": 2,
      "cost_functions": [
        {"name": "xor", "arity": 2, "values": ["1", "0", "0", "1"]}
      ]
    }

Values are listed in lexicographic tuple order (leftmost coordinate most
significant) and are rational strings ``"p/q"``, ``"p"`` or ``"inf"``.
Unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, ParseError
from .operations import all_tuples, lex_index
from .rationals import INF, ExtendedRational, ext, format_ext, parse_ext


@dataclass(frozen=True)
class CostFunction:
    n: int
    arity: int
    table: tuple
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"domain size must be positive, got {self.n}")
        if self.arity < 1:
            raise InputError(f"cost functions need arity >= 1, got {self.arity}")
        table = tuple(ext(v) for v in self.table)
        if len(table) != self.n**self.arity:
            raise InputError(
                f"table of {self.name or 'cost function'} has length {len(table)}, "
                f"expected {self.n ** self.arity}"
            )
        object.__setattr__(self, "table", table)

    def __call__(self, *args) -> ExtendedRational:
        return self.table[lex_index(args, self.n)]

    def at(self, t: Sequence[int]) -> ExtendedRational:
        return self.table[lex_index(t, self.n)]

    def renamed(self, name: str) -> "CostFunction":
        return CostFunction(self.n, self.arity, self.table, name)

    def same_table(self, other: "CostFunction") -> bool:
        return (self.n, self.arity, self.table) == (other.n, other.arity, other.table)

    def __repr__(self):
        vals = ", ".join(format_ext(v) for v in self.table)
        return f"CostFunction({self.name!r}, n={self.n}, arity={self.arity}, [{vals}])"


def from_function(n: int, arity: int, fn, name: str = "") -> CostFunction:
    return CostFunction(n, arity, tuple(ext(fn(*t)) for t in all_tuples(n, arity)), name)


def feas(rho: CostFunction) -> tuple:
    """Feasibility relation: the tuples with finite cost, in lexicographic order."""
    return tuple(t for t, v in zip(all_tuples(rho.n, rho.arity), rho.table) if v is not INF)


def crisp(n: int, relation: Iterable[Sequence[int]], arity: int, name: str = "") -> CostFunction:
    rel = {tuple(t) for t in relation}
    return from_function(n, arity, lambda *t: Fraction(0) if t in rel else INF, name)


def feasibility_function(rho: CostFunction, name: str = "") -> CostFunction:
    """The crisp function that is 0 on Feas(rho) and INF elsewhere."""
    return CostFunction(
        rho.n, rho.arity, tuple(INF if v is INF else Fraction(0) for v in rho.table), name
    )


def is_crisp(rho: CostFunction) -> bool:
    return all(v is INF or v == 0 for v in rho.table)


def is_finite_valued(rho: CostFunction) -> bool:
    return all(v is not INF for v in rho.table)


# a few named functions used throughout


def rho_xor() -> CostFunction:
    """Cost 1 on equal pairs; MAX-CUT edges."""
    return CostFunction(2, 2, (1, 0, 0, 1), "xor")


def rho_neq() -> CostFunction:
    """Cost 1 on unequal pairs (submodular)."""
    return CostFunction(2, 2, (0, 1, 1, 0), "neq")


def rho_eq(n: int) -> CostFunction:
    """Crisp equality."""
    return from_function(n, 2, lambda x, y: 0 if x == y else INF, "eq")


def constant_n(n: int, i: int, name: str | None = None) -> CostFunction:
    """Crisp unary constant: 0 at ``i``, INF elsewhere."""
    return from_function(n, 1, lambda x: 0 if x == i else INF, name if name is not None else f"N_{i}")


@dataclass(frozen=True)
class Language:
    n: int
    functions: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"domain_size must be a positive integer, got {self.n!r}")
        fs = tuple(self.functions)
        seen = set()
        for i, f in enumerate(fs):
            if f.n != self.n:
                raise InputError(f"function {f.name!r} is over a domain of size {f.n}", f"cost_functions[{i}]")
            if f.name in seen:
                raise InputError(f"duplicate function name {f.name!r}", f"cost_functions[{i}]")
            seen.add(f.name)
        object.__setattr__(self, "functions", fs)

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)

    def __getitem__(self, name: str) -> CostFunction:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def names(self):
        return tuple(f.name for f in self.functions)

    def with_functions(self, extra: Iterable[CostFunction]) -> "Language":
        return Language(self.n, self.functions + tuple(extra))


def make_language(*functions: CostFunction) -> Language:
    """Build a language, naming anonymous functions ``f0, f1, ...``."""
    if not functions:
        raise InputError("at least one function is needed to infer the domain")
    named = []
    for i, f in enumerate(functions):
        named.append(f if f.name else f.renamed(f"f{i}"))
    return Language(functions[0].n, tuple(named))


def classify_kind(lang: Language) -> str:
    if all(is_crisp(f) for f in lang):
        return "crisp"
    if all(is_finite_valued(f) for f in lang):
        return "finite-valued"
    return "general-valued"


# ---------------------------------------------------------------------------
# serialization

_LANG_KEYS = {"domain_size", "cost_functions"}
_FN_KEYS = {"name", "arity", "values"}


def language_to_dict(lang: Language) -> dict:
    return {
        "domain_size": lang.n,
        "cost_functions": [
            {"name": f.name, "arity": f.arity, "values": [format_ext(v) for v in f.table]}
            for f in lang.functions
        ],
    }


def serialize_language(lang: Language) -> str:
    return json.dumps(language_to_dict(lang), indent=2) + "\n"


def _require_int(value, where):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"expected an integer, got {value!r}", where)
    return value


def language_from_dict(data, where="$") -> Language:
    if not isinstance(data, dict):
        raise ParseError("language must be an object", where)
    unknown = set(data) - _LANG_KEYS
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}", where)
    missing = _LANG_KEYS - set(data)
    if missing:
        raise ParseError(f"missing field(s) {sorted(missing)}", where)
    n = _require_int(data["domain_size"], f"{where}.domain_size")
    if n < 1:
        raise ParseError("domain_size must be positive", f"{where}.domain_size")
    fns = data["cost_functions"]
    if not isinstance(fns, list):
        raise ParseError("cost_functions must be a list", f"{where}.cost_functions")
    out = []
    names = set()
    for i, entry in enumerate(fns):
        loc = f"{where}.cost_functions[{i}]"
        if not isinstance(entry, dict):
            raise ParseError("cost function must be an object", loc)
        unknown = set(entry) - _FN_KEYS
        if unknown:
            raise ParseError(f"unknown field(s) {sorted(unknown)}", loc)
        missing = _FN_KEYS - set(entry)
        if missing:
            raise ParseError(f"missing field(s) {sorted(missing)}", loc)
        name = entry["name"]
        if not isinstance(name, str) or not name:
            raise ParseError("name must be a non-empty string", f"{loc}.name")
        if name in names:
            raise ParseError(f"duplicate function name {name!r}", f"{loc}.name")
        names.add(name)
        arity = _require_int(entry["arity"], f"{loc}.arity")
        if arity < 1:
            raise ParseError("arity must be at least 1", f"{loc}.arity")
        values = entry["values"]
        if not isinstance(values, list):
            raise ParseError("values must be a list", f"{loc}.values")
        if len(values) != n**arity:
            raise ParseError(
                f"length mismatch: {len(values)} values for arity {arity} over {n} elements "
                f"(expected {n ** arity})",
                f"{loc}.values",
            )
        table = tuple(parse_ext(v, f"{loc}.values[{k}]") for k, v in enumerate(values))
        out.append(CostFunction(n, arity, table, name))
    return Language(n, tuple(out))


def parse_language(text: str) -> Language:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from None
    return language_from_dict(data)


def load_language(path) -> Language:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_language(text)
    except ParseError as e:
        raise ParseError(str(e), str(path)) from None


def restrict_language(lang: Language, elements: Sequence[int]) -> Language:
    """Restriction of every function to ``elements``, re-indexed increasingly."""
    elements = sorted(set(elements))
    if not elements or any(e < 0 or e >= lang.n for e in elements):
        raise InputError(f"bad subset {elements} of a {lang.n}-element domain")
    m = len(elements)
    fns = []
    for f in lang:
        table = tuple(f.at([elements[i] for i in t]) for t in all_tuples(m, f.arity))
        fns.append(CostFunction(m, f.arity, table, f.name))
    return Language(m, tuple(fns))
