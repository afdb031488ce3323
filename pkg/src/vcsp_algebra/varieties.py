"""Power, quotient and subalgebra transforms of languages and instances.

Each transform comes with an instance map under which optima agree exactly.
Elements of ``D^k`` are packed lexicographically, first coordinate most
significant, matching the table order used everywhere else.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .config import DEFAULT_BUDGET, Budget
from .errors import BudgetExceeded, IncompatibleCongruence, InputError, NotASubuniverse, ParseError
from .language import CostFunction, Language, restrict_language
from .operations import Operation, all_tuples, lex_index, unlex
from .rationals import INF
from .vcsp import Instance


def integer_root(size: int, exponent: int) -> int:
    """``b`` with ``b ** exponent == size``; InputError when there is none."""
    if exponent < 1:
        raise InputError("exponent must be at least 1")
    b = round(size ** (1.0 / exponent))
    for cand in (b - 1, b, b + 1):
        if cand >= 1 and cand**exponent == size:
            return cand
    raise InputError(f"domain size {size} is not a {exponent}-th power")


def pack(t: Sequence[int], base: int) -> int:
    return lex_index(t, base)


def unpack(x: int, base: int, exponent: int) -> tuple:
    return unlex(x, base, exponent)


# ---------------------------------------------------------------------------
# finite powers


def power_lift(lang: Language, exponent: int, budget: Budget = DEFAULT_BUDGET) -> Language:
    """Language over ``D^k`` to a language over ``D`` of ``k``-fold arity.

    ``rho'(x_1^1..x_1^k, ..., x_r^1..x_r^k) = rho(pack(x_1), ..., pack(x_r))``.
    """
    base = integer_root(lang.n, exponent)
    fns = []
    for f in lang:
        arity = f.arity * exponent
        if base**arity > budget.assignments:
            raise BudgetExceeded(f"lifted table of {f.name!r} has {base ** arity} entries")
        table = []
        for t in all_tuples(base, arity):
            packed = [pack(t[i * exponent:(i + 1) * exponent], base) for i in range(f.arity)]
            table.append(f.at(packed))
        fns.append(CostFunction(base, arity, tuple(table), f.name))
    return Language(base, tuple(fns))


def power_variables(v: str, exponent: int) -> tuple:
    return tuple(f"{v}.{j + 1}" for j in range(exponent))


def power_lift_instance(instance: Instance, lifted: Language, exponent: int) -> Instance:
    """Replace every variable by ``exponent`` copies and every function by its lift."""
    variables = tuple(w for v in instance.variables for w in power_variables(v, exponent))
    cons = []
    for scope, f in instance.constraints:
        new_scope = tuple(w for v in scope for w in power_variables(v, exponent))
        cons.append((new_scope, lifted[f.name]))
    return Instance(lifted.n, variables, tuple(cons))


def power_assignment_down(assignment: dict, variables: Iterable[str], base: int, exponent: int) -> dict:
    """Pack a lifted assignment back into one over ``D^k``."""
    return {v: pack([assignment[w] for w in power_variables(v, exponent)], base) for v in variables}


def power_assignment_up(assignment: dict, base: int, exponent: int) -> dict:
    out = {}
    for v, x in assignment.items():
        for w, y in zip(power_variables(v, exponent), unpack(x, base, exponent)):
            out[w] = y
    return out


# ---------------------------------------------------------------------------
# quotients


@dataclass(frozen=True)
class Congruence:
    """A partition of ``{0..n-1}``; classes are sorted and ordered by least element."""

    n: int
    classes: tuple

    def __post_init__(self):
        classes = [tuple(sorted(set(c))) for c in self.classes]
        if any(not c for c in classes):
            raise InputError("congruence classes must be non-empty")
        seen = [x for c in classes for x in c]
        if sorted(seen) != list(range(self.n)):
            raise InputError(f"classes must partition 0..{self.n - 1} exactly")
        object.__setattr__(self, "classes", tuple(sorted(classes)))

    @classmethod
    def identity(cls, n):
        return cls(n, tuple((x,) for x in range(n)))

    def class_of(self, x: int) -> int:
        for i, c in enumerate(self.classes):
            if x in c:
                return i
        raise InputError(f"{x} is outside the domain")

    @property
    def projection_map(self) -> tuple:
        return tuple(self.class_of(x) for x in range(self.n))

    def related(self, x, y) -> bool:
        return self.class_of(x) == self.class_of(y)

    def is_compatible(self, ops: Iterable[Operation]) -> bool:
        return find_incompatibility(self, ops) is None


def find_incompatibility(cong: Congruence, ops: Iterable[Operation]):
    """``(op, a, b)`` with ``a ~ b`` coordinate-wise but ``op(a) !~ op(b)``, or None."""
    cls = cong.projection_map
    for f in ops:
        if f.n != cong.n:
            raise InputError("operation over a different domain")
        # group argument tuples by their class pattern; f must be constant on classes
        images: dict = {}
        for t in all_tuples(f.n, f.arity):
            key = tuple(cls[x] for x in t)
            y = f(*t)
            if key in images and cls[images[key][1]] != cls[y]:
                return f, images[key][0], t
            images.setdefault(key, (t, y))
    return None


def quotient_operation(f: Operation, cong: Congruence) -> Operation:
    """``f`` acting on classes via least representatives."""
    reps = [c[0] for c in cong.classes]
    cls = cong.projection_map
    k = len(reps)
    return Operation(k, f.arity, tuple(cls[f(*(reps[i] for i in t))] for t in all_tuples(k, f.arity)))


def quotient_lift(lang: Language, cong: Congruence, ops: Iterable[Operation] | None = None) -> Language:
    """Pull a language over the classes back to ``D``: ``rho'(x) = rho([x])``."""
    if len(cong.classes) != lang.n:
        raise InputError(f"language has {lang.n} elements but the congruence has {len(cong.classes)} classes")
    if ops is not None:
        bad = find_incompatibility(cong, ops)
        if bad is not None:
            f, a, b = bad
            raise IncompatibleCongruence(f"{list(a)} ~ {list(b)} but their images under {f} are not related")
    cls = cong.projection_map
    fns = []
    for f in lang:
        table = tuple(f.at([cls[x] for x in t]) for t in all_tuples(cong.n, f.arity))
        fns.append(CostFunction(cong.n, f.arity, table, f.name))
    return Language(cong.n, tuple(fns))


def swap_functions(instance: Instance, lang: Language) -> Instance:
    """Same scopes, functions replaced by their namesakes in ``lang``."""
    return Instance(lang.n, instance.variables, tuple((s, lang[f.name]) for s, f in instance.constraints))


def load_congruence(path, n: int | None = None) -> Congruence:
    """Read a list of classes; ``n`` defaults to the number of listed elements."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", f"{path}: line {e.lineno}") from None
    if not isinstance(data, list) or not all(
        isinstance(c, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in c) for c in data
    ):
        raise ParseError("congruence must be a list of integer lists", str(path))
    if n is None:
        n = sum(len(c) for c in data)
    try:
        return Congruence(n, tuple(tuple(c) for c in data))
    except InputError as e:
        raise ParseError(str(e), str(path)) from None


# ---------------------------------------------------------------------------
# subalgebras


def closure_failure(subset: Sequence[int], ops: Iterable[Operation]):
    """``(op, args, value)`` leaving ``subset``, or None if it is a subuniverse."""
    s = sorted(set(subset))
    sset = set(s)
    for f in ops:
        for t in itertools.product(s, repeat=f.arity):
            y = f(*t)
            if y not in sset:
                return f, t, y
    return None


def subalgebra_restrict(lang: Language, subset: Sequence[int], ops: Iterable[Operation] | None = None) -> Language:
    """``Gamma[S]`` with elements of ``S`` re-indexed increasingly."""
    if ops is not None:
        bad = closure_failure(subset, ops)
        if bad is not None:
            f, t, y = bad
            raise NotASubuniverse(f"{f} maps {list(t)} to {y}, outside {sorted(set(subset))}")
    return restrict_language(lang, subset)


def subalgebra_extend(lang: Language, subset: Sequence[int], n: int) -> Language:
    """View a language over ``S`` as one over ``D``: INF off ``S``."""
    s = sorted(set(subset))
    if len(s) != lang.n or any(x < 0 or x >= n for x in s):
        raise InputError("subset does not match the language's domain")
    pos = {x: i for i, x in enumerate(s)}
    fns = []
    for f in lang:
        table = []
        for t in all_tuples(n, f.arity):
            if all(x in pos for x in t):
                table.append(f.at([pos[x] for x in t]))
            else:
                table.append(INF)
        fns.append(CostFunction(n, f.arity, tuple(table), f.name))
    return Language(n, tuple(fns))
