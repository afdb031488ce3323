import itertools
import random

import pytest

from corpus import SEED, named_languages, random_core_languages, random_instance
from vcsp_algebra.cores import compute_core, core_report, reduce_rigid_instance, restrict_instance, rigid_core
from vcsp_algebra.errors import CoreRequired, InputError, NotACore
from vcsp_algebra.language import CostFunction, Language, constant_n, rho_neq, rho_xor
from vcsp_algebra.operations import constant, identity
from vcsp_algebra.polymorphisms import enumerate_polymorphisms
from vcsp_algebra.rationals import INF
from vcsp_algebra.vcsp import Instance, cost, solve
from vcsp_algebra.weightings import build_indicator, find_violation

XOR = Language(2, (rho_xor(),))


def brute_opt(instance):
    return min(cost(instance, s) for s in itertools.product(range(instance.n), repeat=len(instance.variables)))


def test_core_report_examples():
    assert core_report(XOR).is_core
    assert core_report(named_languages()["constants"]).is_core
    rep = core_report(Language(2, (CostFunction(2, 1, (0, 1), "r0"),)))
    assert not rep.is_core
    assert rep.witness == constant(2, 1, 0)
    assert rep.weighting[rep.witness] > 0
    assert find_violation(rep.weighting, Language(2, (CostFunction(2, 1, (0, 1), "r0"),))) is None


def test_core_report_invariant():
    with pytest.raises(InputError):
        type(core_report(XOR))(True, constant(2, 1, 0))


def test_compute_core_examples():
    core, labels, chain = compute_core(Language(2, (CostFunction(2, 1, (0, 1), "r0"),)))
    assert labels == (0,) and core["r0"].table == (0,)
    assert chain == ((0, 1), (0,))
    core, labels, _ = compute_core(XOR)
    assert core == XOR and labels == (0, 1)
    core, labels, _ = compute_core(Language(3, (CostFunction(3, 1, (0, 0, 0), "z"),)))
    assert labels == (0,)


def test_neq_collapses_to_a_point():
    core, labels, _ = compute_core(Language(2, (rho_neq(),)))
    assert core.n == 1 and labels == (0,)


def test_compute_core_keeps_optima():
    rng = random.Random(SEED)
    langs = [Language(3, (CostFunction(3, 2, tuple(rng.choice((0, 1, 2, INF)) for _ in range(9)), "r"),
                          CostFunction(3, 1, tuple(rng.choice((0, 1)) for _ in range(3)), "u")))
             for _ in range(15)]
    for lang in langs:
        core, _, _ = compute_core(lang)
        assert core_report(core).is_core
        for _ in range(4):
            inst = random_instance(rng, lang, rng.randint(1, 4), rng.randint(1, 4))
            assert brute_opt(inst) == brute_opt(restrict_instance(inst, core))


def test_rigid_core_examples():
    gc = rigid_core(XOR)
    assert gc.names == ("xor", "N_0", "N_1")
    assert list(enumerate_polymorphisms(gc, 1)) == [identity(2)]
    # already rigid: constants are still added, under fresh names
    gcc = rigid_core(gc)
    assert len(gcc) == 5 and list(enumerate_polymorphisms(gcc, 1)) == [identity(2)]
    with pytest.raises(NotACore):
        rigid_core(Language(2, (rho_neq(),)))


def test_rigid_core_on_corpus():
    for lang in random_core_languages(40):
        assert list(enumerate_polymorphisms(rigid_core(lang), 1)) == [identity(lang.n)]


def _reduce(inst_cons, variables=("v",)):
    gc = rigid_core(XOR)
    inst = Instance(2, variables, tuple((s, gc[name]) for s, name in inst_cons))
    return inst, reduce_rigid_instance(XOR, gc, inst)


def test_reduction_single_pin():
    inst, red = _reduce([(("v",), "N_0")])
    value, s = red.recover()
    assert value == 0 and s == {"v": 0}
    opt, _ = solve(red.instance)
    assert opt == red.m * red.P


def test_reduction_contradictory_pins():
    inst, red = _reduce([(("v",), "N_0"), (("v",), "N_1")])
    opt, _ = solve(red.instance)
    assert opt > red.m * red.P + red.bound
    assert red.recover() == (INF, None)


def test_reduction_without_pins():
    inst, red = _reduce([(("a", "b"), "xor"), (("b", "c"), "xor"), (("a", "c"), "xor")], ("a", "b", "c"))
    opt, _ = solve(red.instance)
    assert opt - red.m * red.P == brute_opt(inst) == 1
    assert len(red.instance.constraints) == 3 + red.m


def test_reduction_brute_force_corpus():
    rng = random.Random(SEED)
    for lang in random_core_languages(12):
        gc = rigid_core(lang)
        ind = build_indicator(lang, 1)
        for _ in range(4):
            inst = random_instance(rng, gc, rng.randint(1, 3), rng.randint(1, 4))
            red = reduce_rigid_instance(lang, gc, inst, indicator=ind)
            value, s = red.recover()
            assert value == brute_opt(inst)
            if s is not None:
                assert cost(inst, s) == value


def test_reduction_errors():
    gc = rigid_core(XOR)
    other = Language(2, (rho_xor(), CostFunction(2, 1, (0, 0), "w")))
    inst = Instance(2, ("v",), ((("v",), other["w"]),))
    with pytest.raises(InputError):
        reduce_rigid_instance(XOR, gc, inst)
    with pytest.raises(CoreRequired):
        lang = Language(2, (rho_neq(),))
        reduce_rigid_instance(lang, lang.with_functions([constant_n(2, 0)]), Instance(2, ("v",), ()))
