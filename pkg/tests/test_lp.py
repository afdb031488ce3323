from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import system_feasible
from vcsp_algebra.errors import MalformedSystem
from vcsp_algebra.lp import (
    FarkasCertificate,
    GordanSolution,
    Kind,
    LinearSystem,
    Row,
    SeparatingVector,
    Solution,
    check_certificate,
    check_solution,
    feasible_point,
    solve_farkas,
    solve_gordan,
)


@st.composite
def systems(draw, max_vars=8, max_rows=12):
    nv = draw(st.integers(0, max_vars))
    nrows = draw(st.integers(0, max_rows))
    coeff = st.integers(-3, 3)
    rows = []
    for _ in range(nrows):
        rows.append(Row([draw(coeff) for _ in range(nv)], draw(coeff), draw(st.sampled_from([Kind.GEQ, Kind.EQ]))))
    return LinearSystem(nv, rows, has_free_constant=draw(st.booleans()))


def test_simple_feasible():
    # z0 + z1 = 1 + C, z0 >= 1/2 + C
    s = LinearSystem(2, [Row([1, 1], 1, Kind.EQ), Row([1, 0], Fraction(1, 2))])
    res = solve_farkas(s)
    assert isinstance(res, Solution) and check_solution(s, res)


def test_simple_infeasible_without_constant():
    # z0 = -1 has no non-negative solution
    s = LinearSystem(1, [Row([1], -1, Kind.EQ)], has_free_constant=False)
    res = solve_farkas(s)
    assert isinstance(res, FarkasCertificate) and check_certificate(s, res)
    assert feasible_point(s.rows, 1) is None


def test_free_constant_rescues():
    s = LinearSystem(1, [Row([1], -1, Kind.EQ)], has_free_constant=True)
    assert isinstance(solve_farkas(s), Solution)


def test_shared_constant_can_conflict():
    # z = 1 + C and z = 2 + C cannot both hold
    s = LinearSystem(1, [Row([1], 1, Kind.EQ), Row([1], 2, Kind.EQ)])
    res = solve_farkas(s)
    assert isinstance(res, FarkasCertificate)
    assert sum(res.y) == 0


def test_geq_gap_is_infeasible():
    # subtracting the rows leaves z1 <= -1
    s = LinearSystem(2, [Row([1, 1], 1, Kind.EQ), Row([1, 0], 2)])
    res = solve_farkas(s)
    assert isinstance(res, FarkasCertificate) and check_certificate(s, res)


def test_empty_system():
    assert solve_farkas(LinearSystem(3, [])) == Solution(z=(Fraction(0),) * 3, C=Fraction(0))


def test_tampered_certificate_rejected():
    s = LinearSystem(1, [Row([1], 1, Kind.EQ), Row([1], 2, Kind.EQ)])
    cert = solve_farkas(s)
    assert not check_certificate(s, FarkasCertificate(tuple(-y for y in cert.y)))
    assert not check_certificate(s, FarkasCertificate(cert.y[:1]))


def test_malformed_rows():
    with pytest.raises(MalformedSystem):
        LinearSystem(2, [Row([1], 0)])
    with pytest.raises(MalformedSystem):
        LinearSystem(-1, [])


def test_fractional_coefficients():
    s = LinearSystem(2, [Row([Fraction(1, 3), Fraction(2, 7)], Fraction(5, 11), Kind.EQ)], has_free_constant=False)
    res = solve_farkas(s)
    assert isinstance(res, Solution) and check_solution(s, res)


@settings(max_examples=300, deadline=None)
@given(systems())
def test_exactly_one_branch_and_oracle_agreement(system):
    res = solve_farkas(system)
    if isinstance(res, Solution):
        assert check_solution(system, res)
        assert system_feasible(system)
    else:
        assert check_certificate(system, res)
        assert not system_feasible(system)


@settings(max_examples=50, deadline=None)
@given(systems(max_vars=5, max_rows=6))
def test_deterministic(system):
    assert solve_farkas(system) == solve_farkas(system)


def test_gordan_both_sides():
    # z0 - z1 = 0 has z = (1, 1)
    res = solve_gordan(2, [[1, -1]])
    assert isinstance(res, GordanSolution) and sum(res.z) > 0
    # z0 + z1 = 0 forces z = 0
    res = solve_gordan(2, [[1, 1]])
    assert isinstance(res, SeparatingVector)
    assert all(res.y[0] * a > 0 for a in (1, 1))
