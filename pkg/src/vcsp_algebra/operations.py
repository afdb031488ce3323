"""Operations on a finite domain ``{0, ..., n-1}`` stored as lexicographic tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import InputError


def lex_index(t: Sequence[int], n: int) -> int:
    """Position of tuple ``t`` in the lexicographic order of ``D^len(t)``.

    The leftmost coordinate is the most significant digit.
    """
    idx = 0
    for x in t:
        idx = idx * n + x
    return idx


@lru_cache(maxsize=None)
def all_tuples(n: int, r: int) -> tuple:
    return tuple(itertools.product(range(n), repeat=r))


def unlex(idx: int, n: int, r: int) -> tuple:
    out = [0] * r
    for i in range(r - 1, -1, -1):
        idx, out[i] = divmod(idx, n)
    return tuple(out)


@dataclass(frozen=True, order=True)
class Operation:
    n: int
    arity: int
    table: tuple

    def __post_init__(self):
        if self.n < 1 or self.arity < 1:
            raise InputError(f"operation needs n >= 1 and arity >= 1, got n={self.n}, arity={self.arity}")
        table = tuple(int(v) for v in self.table)
        if len(table) != self.n**self.arity:
            raise InputError(f"operation table has length {len(table)}, expected {self.n ** self.arity}")
        if any(v < 0 or v >= self.n for v in table):
            raise InputError("operation table entries must lie in 0..n-1")
        object.__setattr__(self, "table", table)

    def __call__(self, *args):
        return self.table[lex_index(args, self.n)]

    def apply_rows(self, rows: Sequence[Sequence[int]]) -> tuple:
        """Apply coordinate-wise to ``arity`` tuples of equal length."""
        return tuple(self.table[lex_index(col, self.n)] for col in zip(*rows))

    def __repr__(self):
        return f"Operation(n={self.n}, arity={self.arity}, table={list(self.table)})"


def from_function(n: int, arity: int, fn) -> Operation:
    return Operation(n, arity, tuple(fn(*t) for t in all_tuples(n, arity)))


def projection(n: int, arity: int, i: int) -> Operation:
    """The ``i``-th projection (0-based) of the given arity."""
    if not 0 <= i < arity:
        raise InputError(f"projection index {i} out of range for arity {arity}")
    return Operation(n, arity, tuple(t[i] for t in all_tuples(n, arity)))


def projections(n: int, arity: int) -> list:
    return [projection(n, arity, i) for i in range(arity)]


def identity(n: int) -> Operation:
    return projection(n, 1, 0)


def constant(n: int, arity: int, c: int) -> Operation:
    return Operation(n, arity, (c,) * n**arity)


def op_min(n: int = 2, arity: int = 2) -> Operation:
    return from_function(n, arity, lambda *a: min(a))


def op_max(n: int = 2, arity: int = 2) -> Operation:
    return from_function(n, arity, lambda *a: max(a))


def inversion() -> Operation:
    return Operation(2, 1, (1, 0))


def majority2() -> Operation:
    """The unique majority operation on {0, 1}."""
    return from_function(2, 3, lambda x, y, z: 1 if x + y + z >= 2 else 0)


def minority2() -> Operation:
    """The unique minority operation on {0, 1}: x xor y xor z."""
    return from_function(2, 3, lambda x, y, z: x ^ y ^ z)


# ---------------------------------------------------------------------------
# predicates


def projection_index(f: Operation):
    """Index of the coordinate ``f`` projects onto, or None."""
    for i in range(f.arity):
        if all(v == t[i] for v, t in zip(f.table, all_tuples(f.n, f.arity))):
            return i
    return None


def is_projection(f: Operation) -> bool:
    return projection_index(f) is not None


def is_idempotent(f: Operation) -> bool:
    return all(f(*([x] * f.arity)) == x for x in range(f.n))


def is_cyclic(f: Operation) -> bool:
    return all(f(*t) == f(*(t[1:] + t[:1])) for t in all_tuples(f.n, f.arity))


def _pattern_check(f: Operation, expect_majority: bool) -> bool:
    if f.arity != 3:
        return False
    for x in range(f.n):
        for y in range(f.n):
            want = x if expect_majority else y
            if f(x, x, y) != want or f(x, y, x) != want or f(y, x, x) != want:
                return False
    return True


def is_majority(f: Operation) -> bool:
    return _pattern_check(f, True)


def is_minority(f: Operation) -> bool:
    return _pattern_check(f, False)


def is_conservative(f: Operation) -> bool:
    return all(f.table[i] in t for i, t in enumerate(all_tuples(f.n, f.arity)))


def is_bijective(f: Operation) -> bool:
    return f.arity == 1 and len(set(f.table)) == f.n


def is_commutative(f: Operation) -> bool:
    return f.arity == 2 and all(f(x, y) == f(y, x) for x in range(f.n) for y in range(f.n))


# ---------------------------------------------------------------------------
# superposition


def compose(f: Operation, gs: Sequence[Operation]) -> Operation:
    """The superposition ``f[g_1, ..., g_k]``."""
    if len(gs) != f.arity:
        raise InputError(f"superposition needs {f.arity} inner operations, got {len(gs)}")
    if not gs:
        raise InputError("empty superposition")
    ell = gs[0].arity
    n = f.n
    for g in gs:
        if g.arity != ell or g.n != n:
            raise InputError("inner operations must share arity and domain")
    tables = [g.table for g in gs]
    ft = f.table
    out = []
    for cells in zip(*tables):
        idx = 0
        for v in cells:
            idx = idx * n + v
        out.append(ft[idx])
    return Operation(n, ell, tuple(out))


def inverse(f: Operation) -> Operation:
    if not is_bijective(f):
        raise InputError("only unary bijections have inverses")
    inv = [0] * f.n
    for x, y in enumerate(f.table):
        inv[y] = x
    return Operation(f.n, 1, tuple(inv))


def restrict(f: Operation, elements: Sequence[int]) -> Operation:
    """Restriction of ``f`` to a subuniverse, re-indexed in increasing order."""
    elements = sorted(elements)
    pos = {e: i for i, e in enumerate(elements)}
    m = len(elements)
    table = []
    for t in all_tuples(m, f.arity):
        v = f(*(elements[i] for i in t))
        if v not in pos:
            raise InputError("subset is not closed under the operation")
        table.append(pos[v])
    return Operation(m, f.arity, tuple(table))


def sorted_unique(ops: Iterable[Operation]) -> tuple:
    return tuple(sorted(set(ops), key=lambda o: o.table))
