import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import SEED, random_instance, random_language, random_languages
from vcsp_algebra.config import Budget
from vcsp_algebra.errors import BudgetExceeded, InputError, ParseError
from vcsp_algebra.language import CostFunction, Language, rho_xor, serialize_language
from vcsp_algebra.rationals import INF
from vcsp_algebra.vcsp import (
    Instance,
    add_constant,
    add_functions,
    all_optimal,
    cost,
    express,
    load_instance,
    minimise,
    scale_function,
    serialize_instance,
    solve,
    wrelclo_step,
)
from vcsp_algebra.weightings import find_violation, positive_clone


def test_cost_sums_constraints():
    xor = rho_xor()
    inst = Instance(2, ("a", "b"), ((("a", "b"), xor), (("a", "a"), xor)))
    assert cost(inst, {"a": 0, "b": 1}) == 1
    assert cost(inst, (0, 0)) == 2


def test_infeasible_optimum():
    never = CostFunction(2, 1, (INF, INF), "never")
    value, _ = solve(Instance(2, ("x",), ((("x",), never),)))
    assert value is INF


def test_ties_break_lexicographically():
    flat = CostFunction(2, 1, (0, 0), "flat")
    inst = Instance(2, ("x", "y"), ((("x",), flat), (("y",), flat)))
    value, s = solve(inst)
    assert value == 0 and s == {"x": 0, "y": 0}
    value, all_s = all_optimal(inst)
    assert len(all_s) == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_solve_agrees_with_cost(seed):
    rng = random.Random(seed)
    lang = random_language(rng, n=rng.randint(1, 3))
    inst = random_instance(rng, lang, rng.randint(1, 4), rng.randint(0, 4))
    value, s = solve(inst)
    brute = min(cost(inst, a) for a in itertools.product(range(inst.n), repeat=len(inst.variables)))
    assert value == brute
    if value is not INF:
        assert cost(inst, s) == value


def test_budget_guard():
    inst = Instance(2, tuple(f"v{i}" for i in range(6)), ())
    with pytest.raises(BudgetExceeded):
        solve(inst, Budget(assignments=32))


def test_express_identity_returns_constraint():
    f = CostFunction(2, 2, (0, 1, INF, Fraction(1, 2)), "f")
    inst = Instance(2, ("x", "y"), ((("x", "y"), f),))
    assert express(inst, ["x", "y"]).table == f.table


def test_express_minimises_hidden_variables():
    xor = rho_xor()
    inst = Instance(2, ("x", "y", "z"), ((("x", "y"), xor), (("y", "z"), xor)))
    # with x = z the middle variable can differ from both; otherwise one edge is monochromatic
    assert express(inst, ["x", "z"]).table == (0, 1, 1, 0)
    # repeated projection variables read the diagonal
    assert express(inst, ["x", "x"]).table == (0, INF, INF, 0)


def test_closure_steps():
    f = CostFunction(2, 1, (1, INF), "f")
    assert scale_function(f, 0).table == (0, 0)
    assert scale_function(f, 2).table == (2, INF)
    assert add_constant(f, Fraction(-1, 2)).table == (Fraction(1, 2), INF)
    g = add_functions(f, f, 2, [0], [1])
    assert g.table == (2, INF, INF, INF)
    assert minimise(g, [1]).table == (2, INF)
    assert wrelclo_step(f, "scale", 3).table == (3, INF)
    with pytest.raises(InputError):
        wrelclo_step(f, "rotate")
    with pytest.raises(InputError):
        minimise(f, [0])


def _derived_functions(lang, rng, count):
    out = []
    for _ in range(count):
        inst = random_instance(rng, lang, rng.randint(1, 3), rng.randint(1, 3))
        proj = [rng.choice(inst.variables) for _ in range(rng.randint(1, 3))]
        f = express(inst, proj)
        if all(v is INF for v in f.table):
            continue
        step = rng.choice(["scale", "add_constant", "minimise", "none"])
        if step == "scale":
            f = scale_function(f, Fraction(rng.randint(0, 3), rng.randint(1, 3)))
        elif step == "add_constant":
            f = add_constant(f, rng.randint(-2, 2))
        elif step == "minimise" and f.arity > 1:
            f = minimise(f, [0])
        out.append(f.renamed(f"d{len(out)}"))
    return out


def test_derived_functions_are_improved_by_weighted_polymorphisms():
    rng = random.Random(SEED)
    for lang in random_languages(15):
        witnesses = []
        for m in (1, 2):
            _, ws = positive_clone(lang, m, with_witnesses=True)
            witnesses.extend(ws)
        derived = _derived_functions(lang, rng, 6)
        if not derived:
            continue
        target = Language(2, tuple(derived))
        for w in witnesses:
            assert find_violation(w, target) is None


def test_instance_validation():
    xor = rho_xor()
    with pytest.raises(InputError):
        Instance(2, ("x", "x"), ())
    with pytest.raises(InputError):
        Instance(2, ("x",), ((("x",), xor),))
    with pytest.raises(InputError):
        Instance(2, ("x",), ((("x", "q"), xor),))


def test_instance_file_round_trip(tmp_path):
    lang = Language(2, (rho_xor(),))
    (tmp_path / "lang.json").write_text(serialize_language(lang))
    inst = Instance(2, ("a", "b"), ((("a", "b"), lang["xor"]),))
    path = tmp_path / "inst.json"
    path.write_text(serialize_instance(inst, "lang.json"))
    loaded, loaded_lang, _ = load_instance(path)
    assert loaded == inst and loaded_lang == lang


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(extra=1),
    lambda d: d.update(domain_size=3),
    lambda d: d["constraints"].append({"scope": ["a"], "function_name": "nope"}),
    lambda d: d["constraints"].append({"scope": ["a", "z"], "function_name": "xor"}),
])
def test_instance_file_errors(tmp_path, mutate):
    lang = Language(2, (rho_xor(),))
    (tmp_path / "lang.json").write_text(serialize_language(lang))
    doc = {"domain_size": 2, "language": "lang.json", "variables": ["a", "b"],
           "constraints": [{"scope": ["a", "b"], "function_name": "xor"}]}
    mutate(doc)
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError):
        load_instance(path)
