"""Polymorphism enumeration and superposition closure."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .config import DEFAULT_BUDGET, Budget
from .errors import BudgetExceeded, InputError
from .language import Language, feas
from .operations import Operation, compose, lex_index, projections


@dataclass(frozen=True)
class OperationSet:
    n: int
    arity: int
    ops: tuple

    def __post_init__(self):
        ops = tuple(sorted(set(self.ops), key=lambda o: o.table))
        for f in ops:
            if f.n != self.n or f.arity != self.arity:
                raise InputError("operation set mixes domains or arities")
        object.__setattr__(self, "ops", ops)

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def __contains__(self, f):
        return f in set(self.ops)


def compatibility_constraints(lang: Language, m: int):
    """Constraints an m-ary table must satisfy to be a polymorphism.

    Each entry is ``(cells, relation)``: the table values at ``cells`` must
    form a tuple of ``relation``.  Duplicates are removed.
    """
    n = lang.n
    seen = set()
    out = []
    for fn in lang:
        rel = feas(fn)
        relset = frozenset(rel)
        for lst in itertools.product(rel, repeat=m):
            cells = tuple(lex_index(col, n) for col in zip(*lst))
            key = (cells, relset)
            if key in seen:
                continue
            seen.add(key)
            out.append((cells, relset))
    return out


def is_polymorphism(f: Operation, lang: Language) -> bool:
    if f.n != lang.n:
        return False
    for fn in lang:
        rel = feas(fn)
        relset = set(rel)
        for lst in itertools.product(rel, repeat=f.arity):
            if f.apply_rows(lst) not in relset:
                return False
    return True


def enumerate_polymorphisms(lang: Language, m: int, budget: Budget = DEFAULT_BUDGET) -> OperationSet:
    """All m-ary polymorphisms, in lexicographic table order."""
    n = lang.n
    cells = n**m
    if cells > budget.op_cells:
        raise BudgetExceeded(f"{n}^{m} = {cells} table cells exceeds budget {budget.op_cells}")
    by_last = defaultdict(list)
    for cs, rel in compatibility_constraints(lang, m):
        by_last[max(cs)].append((cs, rel))
    checks = [by_last.get(k, ()) for k in range(cells)]

    table = [0] * cells
    found = []
    nodes = 0
    # iterative DFS; next_val[k] is the next value to try at cell k
    next_val = [0] * (cells + 1)
    k = 0
    while k >= 0:
        if k == cells:
            found.append(Operation(n, m, tuple(table)))
            if len(found) > budget.ops:
                raise BudgetExceeded(f"more than {budget.ops} polymorphisms of arity {m}")
            k -= 1
            continue
        v = next_val[k]
        if v >= n:
            next_val[k] = 0
            k -= 1
            continue
        next_val[k] = v + 1
        nodes += 1
        if nodes > budget.nodes:
            raise BudgetExceeded(f"polymorphism search exceeded {budget.nodes} nodes")
        table[k] = v
        ok = True
        for cs, rel in checks[k]:
            if tuple(table[c] for c in cs) not in rel:
                ok = False
                break
        if ok:
            k += 1
    return OperationSet(n, m, tuple(found))


def close_under_superposition(n: int, generators: Iterable[Operation], max_arity: int,
                              budget: Budget = DEFAULT_BUDGET) -> dict:
    """Least projection-containing family closed under superposition up to ``max_arity``.

    Returns ``{arity: OperationSet}`` for arities ``1..max_arity``.
    """
    if max_arity < 1:
        raise InputError("max_arity must be at least 1")
    sets = {k: set(projections(n, k)) for k in range(1, max_arity + 1)}
    for g in generators:
        if g.n != n:
            raise InputError("generator over a different domain")
        if g.arity <= max_arity:
            sets[g.arity].add(g)
    done = set()  # (f, gs) combinations already composed
    changed = True
    while changed:
        changed = False
        for k in range(1, max_arity + 1):
            for f in sorted(sets[k], key=lambda o: o.table):
                for ell in range(1, max_arity + 1):
                    inner = sorted(sets[ell], key=lambda o: o.table)
                    for gs in itertools.product(inner, repeat=k):
                        key = (f, gs)
                        if key in done:
                            continue
                        done.add(key)
                        h = compose(f, gs)
                        if h not in sets[ell]:
                            sets[ell].add(h)
                            changed = True
                            total = sum(len(s) for s in sets.values())
                            if total > budget.ops:
                                raise BudgetExceeded(f"superposition closure exceeded {budget.ops} operations")
    return {k: OperationSet(n, k, tuple(s)) for k, s in sets.items()}


def compatible_with(relation: Sequence[Sequence[int]], ops: Iterable[Operation]) -> bool:
    """Whether the relation is closed under each operation, applied coordinate-wise."""
    rel = [tuple(t) for t in relation]
    relset = set(rel)
    for f in ops:
        for lst in itertools.product(rel, repeat=f.arity):
            if f.apply_rows(lst) not in relset:
                return False
    return True
