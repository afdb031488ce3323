import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_language
from vcsp_algebra.errors import InputError, ParseError
from vcsp_algebra.language import (
    CostFunction,
    Language,
    classify_kind,
    constant_n,
    crisp,
    feas,
    feasibility_function,
    make_language,
    parse_language,
    restrict_language,
    rho_eq,
    rho_neq,
    rho_xor,
    serialize_language,
)
from vcsp_algebra.operations import all_tuples, lex_index, unlex
from vcsp_algebra.rationals import INF


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_lex_index_is_a_bijection(n, r):
    tuples = list(itertools.product(range(n), repeat=r))
    assert [lex_index(t, n) for t in tuples] == list(range(n**r))
    assert all(unlex(lex_index(t, n), n, r) == t for t in tuples)
    assert list(all_tuples(n, r)) == tuples


def test_table_lookup_matches_index():
    f = CostFunction(3, 2, tuple(range(9)), "f")
    for t in itertools.product(range(3), repeat=2):
        assert f(*t) == lex_index(t, 3) == f.at(t)


def test_named_functions():
    assert rho_xor().table == (1, 0, 0, 1)
    assert rho_neq().table == (0, 1, 1, 0)
    assert feas(rho_xor()) == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert feas(rho_eq(3)) == ((0, 0), (1, 1), (2, 2))
    assert constant_n(3, 1).table == (INF, 0, INF)
    assert feasibility_function(CostFunction(2, 1, (Fraction(5), INF))).table == (0, INF)
    assert crisp(2, [(1,)], 1).table == (INF, 0)


def test_kinds():
    assert classify_kind(Language(2, (rho_eq(2),))) == "crisp"
    assert classify_kind(Language(2, (rho_xor(), rho_neq()))) == "finite-valued"
    assert classify_kind(Language(2, (rho_xor(), rho_eq(2)))) == "general-valued"


def test_construction_errors():
    with pytest.raises(InputError):
        CostFunction(2, 2, (0, 1, 2), "short")
    with pytest.raises(InputError):
        CostFunction(2, 0, (0,), "nullary")
    with pytest.raises(InputError):
        Language(2, (rho_xor(), rho_xor()))
    with pytest.raises(InputError):
        Language(3, (rho_xor(),))


def test_make_language_names_anonymous_functions():
    lang = make_language(CostFunction(2, 1, (0, 1)), CostFunction(2, 1, (1, 0), "b"))
    assert lang.names == ("f0", "b")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_serialization_is_canonical(seed):
    lang = random_language(random.Random(seed), n=random.Random(seed).randint(1, 3))
    text = serialize_language(lang)
    again = parse_language(text)
    assert again == lang
    assert serialize_language(again) == text


def _doc(**over):
    doc = {"domain_size": 2, "cost_functions": [{"name": "f", "arity": 1, "values": ["0", "1/2"]}]}
    doc.update(over)
    return json.dumps(doc)


@pytest.mark.parametrize("text,fragment", [
    (_doc(extra=1), "unknown field"),
    (_doc(domain_size=0), "positive"),
    (_doc(cost_functions=[{"name": "f", "arity": 1, "values": ["0"]}]), "length mismatch"),
    (_doc(cost_functions=[{"name": "f", "arity": 1, "values": ["0", "0.5"]}]), "bad rational"),
    (_doc(cost_functions=[{"name": "f", "arity": 1, "values": ["0", "1"], "note": ""}]), "unknown field"),
    ("{", "invalid JSON"),
])
def test_parser_rejects(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_language(text)
    assert fragment in str(info.value)


def test_error_carries_location():
    text = _doc(cost_functions=[{"name": "f", "arity": 1, "values": ["0", "x"]}])
    with pytest.raises(ParseError) as info:
        parse_language(text)
    assert "cost_functions[0].values[1]" in str(info.value)


def test_restrict_language_reindexes():
    f = CostFunction(3, 2, tuple(range(9)), "f")
    sub = restrict_language(Language(3, (f,)), [2, 0])
    # elements 0 and 2 become 0 and 1
    assert sub["f"].table == (f(0, 0), f(0, 2), f(2, 0), f(2, 2))
    with pytest.raises(InputError):
        restrict_language(Language(3, (f,)), [3])
