import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import SEED, named_languages, random_language, random_languages
from vcsp_algebra.config import Budget
from vcsp_algebra.errors import BudgetExceeded, InputError
from vcsp_algebra.language import Language, constant_n, rho_eq, rho_xor
from vcsp_algebra.operations import (
    Operation,
    all_tuples,
    compose,
    constant,
    identity,
    inversion,
    is_bijective,
    is_conservative,
    is_cyclic,
    is_idempotent,
    is_majority,
    is_minority,
    is_projection,
    majority2,
    minority2,
    op_max,
    op_min,
    projection,
    projections,
    restrict,
)
from vcsp_algebra.polymorphisms import (
    OperationSet,
    close_under_superposition,
    compatible_with,
    enumerate_polymorphisms,
    is_polymorphism,
)
from vcsp_algebra.rationals import INF


def _brute_polymorphisms(lang, m):
    """Every m-ary table, kept when it maps feasible tuple lists to feasible tuples."""
    n = lang.n
    out = []
    for table in itertools.product(range(n), repeat=n**m):
        f = Operation(n, m, table)
        ok = True
        for rho in lang:
            feas = [t for t, v in zip(all_tuples(n, rho.arity), rho.table) if v is not INF]
            fs = set(feas)
            for lst in itertools.product(feas, repeat=m):
                if tuple(f(*col) for col in zip(*lst)) not in fs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(table)
    return out


def test_small_polymorphism_counts():
    xor = Language(2, (rho_xor(),))
    assert len(enumerate_polymorphisms(xor, 1)) == 4
    consts = Language(2, (constant_n(2, 0), constant_n(2, 1)))
    assert list(enumerate_polymorphisms(consts, 1)) == [identity(2)]
    assert len(enumerate_polymorphisms(consts, 2)) == 4


@pytest.mark.parametrize("m", [1, 2])
def test_enumeration_matches_brute_force(m):
    for lang in list(named_languages().values()) + random_languages(30):
        ours = [f.table for f in enumerate_polymorphisms(lang, m)]
        assert ours == _brute_polymorphisms(lang, m)


def test_enumeration_matches_brute_force_three_elements():
    rng = random.Random(SEED)
    for _ in range(5):
        lang = random_language(rng, n=3, max_arity=2)
        ours = [f.table for f in enumerate_polymorphisms(lang, 1)]
        assert ours == _brute_polymorphisms(lang, 1)


def test_projections_always_present():
    for lang in list(named_languages().values()) + random_languages(30):
        for m in (1, 2, 3):
            pol = enumerate_polymorphisms(lang, m)
            for p in projections(lang.n, m):
                assert p in pol


def test_composition_of_polymorphisms_stays_inside():
    rng = random.Random(SEED)
    for lang in random_languages(20):
        pol2 = list(enumerate_polymorphisms(lang, 2))
        pol1 = enumerate_polymorphisms(lang, 1)
        polset2 = set(pol2)
        for _ in range(20):
            f, g, h = rng.choice(pol2), rng.choice(pol2), rng.choice(pol2)
            assert compose(f, [g, h]) in polset2
            assert compose(f, [rng.choice(list(pol1))] * 2) in pol1


def test_budgets():
    lang = Language(3, (rho_eq(3),))
    with pytest.raises(BudgetExceeded):
        enumerate_polymorphisms(lang, 4)  # 81 cells
    with pytest.raises(BudgetExceeded):
        enumerate_polymorphisms(Language(2, (rho_xor(),)), 2, Budget(ops=3))


def test_operation_set_is_canonical():
    a, b = op_min(), op_max()
    assert OperationSet(2, 2, (b, a, b)).ops == (a, b)
    with pytest.raises(InputError):
        OperationSet(2, 2, (identity(2),))


def test_closure_examples():
    closed = close_under_superposition(2, [op_max()], 2)
    assert set(closed[2]) == set(projections(2, 2)) | {op_max()}
    closed = close_under_superposition(2, [inversion()], 1)
    assert set(closed[1]) == {identity(2), inversion()}
    with pytest.raises(BudgetExceeded):
        close_under_superposition(2, [op_min(), inversion()], 2, Budget(ops=5))


def test_predicates():
    assert is_majority(majority2()) and is_idempotent(majority2())
    assert is_minority(minority2()) and is_idempotent(minority2())
    assert is_cyclic(majority2()) and is_cyclic(minority2())
    assert not is_cyclic(projection(2, 2, 0))
    assert is_projection(projection(2, 3, 2))
    assert is_conservative(op_min()) and not is_conservative(constant(3, 2, 1))
    assert is_bijective(inversion()) and not is_bijective(constant(2, 1, 0))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.data())
def test_majority_and_minority_are_idempotent(n, data):
    table = data.draw(st.lists(st.integers(0, n - 1), min_size=n**3, max_size=n**3))
    f = Operation(n, 3, tuple(table))
    if is_majority(f) or is_minority(f):
        assert is_idempotent(f)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.data())
def test_unary_operations_are_cyclic(n, data):
    table = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    assert is_cyclic(Operation(n, 1, tuple(table)))


def test_compatible_with_and_is_polymorphism():
    xor_c = named_languages()["xor_c"]
    assert not is_polymorphism(inversion(), xor_c)
    assert is_polymorphism(identity(2), xor_c)
    assert compatible_with([(0, 1), (1, 0)], [inversion(), minority2()])
    assert not compatible_with([(0, 1), (1, 0)], [op_min()])


def test_restrict():
    m = op_min(3)
    assert restrict(m, [0, 2]) == op_min(2)
    with pytest.raises(InputError):
        restrict(Operation(3, 1, (1, 2, 0)), [0, 2])
