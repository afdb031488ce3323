"""Exact feasibility for mixed equality/inequality systems over the rationals.

The workhorse is a phase-one simplex on integer rows (each row carries its own
positive denominator) with Bland's anti-cycling rule.  An infeasible system
yields a dual vector read off the final reduced costs, which is turned into a
certificate of unsolvability and re-verified by exact substitution.

Two front ends are exposed:

* :func:`solve_farkas` for systems ``sum_i a_ij z_i (>= | =) b_j + C`` with
  ``z >= 0`` and an optional shared free constant ``C``;
* :func:`solve_gordan` for homogeneous ``A z = 0`` asking for ``z >= 0, z != 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InternalContradiction, MalformedSystem


class Kind(enum.Enum):
    GEQ = ">="
    EQ = "="


@dataclass(frozen=True)
class Row:
    coeffs: tuple
    rhs: Fraction
    kind: Kind

    def __init__(self, coeffs, rhs, kind=Kind.GEQ):
        if isinstance(kind, str):
            kind = Kind(kind)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))
        object.__setattr__(self, "rhs", Fraction(rhs))
        object.__setattr__(self, "kind", kind)


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``sum_i coeffs[i] * z_i (>= | =) rhs (+ C)`` over ``z >= 0``."""

    num_vars: int
    rows: tuple
    has_free_constant: bool = True

    def __init__(self, num_vars, rows=(), has_free_constant=True):
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "has_free_constant", bool(has_free_constant))
        self.validate()

    def validate(self):
        if not isinstance(self.num_vars, int) or self.num_vars < 0:
            raise MalformedSystem(f"num_vars must be a non-negative int, got {self.num_vars!r}")
        for j, row in enumerate(self.rows):
            if not isinstance(row, Row):
                raise MalformedSystem("row is not a Row", f"rows[{j}]")
            if len(row.coeffs) != self.num_vars:
                raise MalformedSystem(
                    f"expected {self.num_vars} coefficients, got {len(row.coeffs)}", f"rows[{j}]"
                )


@dataclass(frozen=True)
class Solution:
    z: tuple
    C: Fraction = Fraction(0)


@dataclass(frozen=True)
class FarkasCertificate:
    y: tuple


@dataclass(frozen=True)
class GordanSolution:
    z: tuple


@dataclass(frozen=True)
class SeparatingVector:
    y: tuple


# ---------------------------------------------------------------------------
# verification by substitution


def check_solution(system: LinearSystem, sol: Solution) -> bool:
    if len(sol.z) != system.num_vars or any(v < 0 for v in sol.z):
        return False
    C = sol.C if system.has_free_constant else Fraction(0)
    if not system.has_free_constant and sol.C != 0:
        return False
    for row in system.rows:
        lhs = sum((a * z for a, z in zip(row.coeffs, sol.z)), Fraction(0))
        target = row.rhs + C
        if row.kind is Kind.EQ and lhs != target:
            return False
        if row.kind is Kind.GEQ and lhs < target:
            return False
    return True


def check_certificate(system: LinearSystem, cert: FarkasCertificate) -> bool:
    y = cert.y
    if len(y) != len(system.rows):
        return False
    if system.has_free_constant and sum(y, Fraction(0)) != 0:
        return False
    for yj, row in zip(y, system.rows):
        if row.kind is Kind.GEQ and yj < 0:
            return False
    for i in range(system.num_vars):
        if sum((yj * row.coeffs[i] for yj, row in zip(y, system.rows)), Fraction(0)) > 0:
            return False
    return sum((yj * row.rhs for yj, row in zip(y, system.rows)), Fraction(0)) > 0


# ---------------------------------------------------------------------------
# phase-one simplex


def _lcm_denominators(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def _phase_one(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], kinds: Sequence[Kind]):
    """Decide ``A x (>=|=) b, x >= 0``.

    Returns ``("x", x)`` with a feasible point, or ``("y", y)`` where
    ``y_j >= 0`` on GEQ rows, ``y^T A <= 0`` column-wise and ``y^T b > 0``.
    """
    nrows = len(A)
    nvars = len(A[0]) if nrows else 0

    # Standard form columns: original vars, then one surplus per GEQ row,
    # then artificials.  GEQ rows with b <= 0 are flipped so their surplus
    # column can start basic.
    surplus_col = {}
    col = nvars
    for j, k in enumerate(kinds):
        if k is Kind.GEQ:
            surplus_col[j] = col
            col += 1
    n_struct = col

    rows = []
    dens = []
    basis = []
    flipped = []
    start_col = []
    art_rows = []
    for j in range(nrows):
        vals = list(A[j]) + [Fraction(0)] * (n_struct - nvars)
        rhs = Fraction(b[j])
        if kinds[j] is Kind.GEQ:
            vals[surplus_col[j]] = Fraction(-1)
        flip = rhs < 0 or (kinds[j] is Kind.GEQ and rhs == 0)
        if flip:
            vals = [-v for v in vals]
            rhs = -rhs
        flipped.append(flip)
        if kinds[j] is Kind.GEQ and flip:
            basis.append(surplus_col[j])
            start_col.append(surplus_col[j])
        else:
            basis.append(None)
            art_rows.append(j)
            start_col.append(None)
        d = _lcm_denominators(vals + [rhs])
        rows.append([int(v * d) for v in vals] + [int(rhs * d)])
        dens.append(d)

    n_art = len(art_rows)
    ncols = n_struct + n_art
    for r in rows:
        rhs = r.pop()
        r.extend([0] * n_art)
        r.append(rhs)
    # artificial columns: integer entry equal to the row denominator (value 1)
    for a, j in enumerate(art_rows):
        c = n_struct + a
        rows[j][c] = dens[j]
        basis[j] = c
        start_col[j] = c

    for j in range(nrows):
        _normalize(rows, dens, j)

    # reduced-cost row for min sum(artificials): z = c - sum over artificial rows
    zden = 1
    if art_rows:
        common = 1
        for j in art_rows:
            common = common * dens[j] // math.gcd(common, dens[j])
        zrow = [0] * (ncols + 1)
        for j in art_rows:
            f = common // dens[j]
            rj = rows[j]
            for c in range(ncols + 1):
                if rj[c]:
                    zrow[c] -= f * rj[c]
        for j in art_rows:
            zrow[basis[j]] = 0
        zden = common
        g = math.gcd(*zrow, zden) if any(zrow) else zden
        zrow = [v // g for v in zrow]
        zden //= g
    else:
        zrow = [0] * (ncols + 1)

    in_basis = [False] * ncols
    for c in basis:
        in_basis[c] = True

    # Bland's rule: smallest improving column, ties in the ratio test broken
    # by smallest basic column.  It cannot cycle.
    while True:
        enter = -1
        for c in range(ncols):
            if zrow[c] < 0 and not in_basis[c]:
                enter = c
                break
        if enter < 0:
            break
        leave = -1
        best_num = best_den = None
        for j in range(nrows):
            a = rows[j][enter]
            if a > 0:
                num = rows[j][-1]
                # compare num/a with best_num/best_den
                if leave < 0:
                    leave, best_num, best_den = j, num, a
                else:
                    lhs = num * best_den
                    rhs_ = best_num * a
                    if lhs < rhs_ or (lhs == rhs_ and basis[j] < basis[leave]):
                        leave, best_num, best_den = j, num, a
        if leave < 0:
            raise InternalContradiction("phase-one objective unbounded")
        # pivot
        dens[leave] = rows[leave][enter]
        _normalize(rows, dens, leave)
        pr = rows[leave]
        pe = pr[enter]  # equals dens[leave]: the pivot value is 1
        for j in range(nrows):
            if j == leave:
                continue
            rj = rows[j]
            a = rj[enter]
            if a:
                rows[j] = [x * pe - a * y for x, y in zip(rj, pr)]
                dens[j] = dens[j] * pe
                _normalize(rows, dens, j)
        a = zrow[enter]
        if a:
            zrow = [x * pe - a * y for x, y in zip(zrow, pr)]
            zden = zden * pe
            g = math.gcd(*zrow, zden)
            zrow = [v // g for v in zrow]
            zden //= g
        in_basis[basis[leave]] = False
        basis[leave] = enter
        in_basis[enter] = True

    objective = Fraction(-zrow[-1], zden)
    if objective == 0:
        x = [Fraction(0)] * nvars
        for j, c in enumerate(basis):
            if c < nvars:
                x[c] = Fraction(rows[j][-1], dens[j])
        return "x", x

    # dual y_j = c(start_col) - reduced_cost(start_col)
    y = []
    for j in range(nrows):
        c = start_col[j]
        cost = 1 if c >= n_struct else 0
        yj = cost - Fraction(zrow[c], zden)
        y.append(-yj if flipped[j] else yj)
    return "y", y


def _normalize(rows, dens, j):
    r = rows[j]
    g = math.gcd(*r, dens[j])
    if g > 1:
        rows[j] = [v // g for v in r]
        dens[j] //= g


# ---------------------------------------------------------------------------
# front ends


def solve_farkas(system: LinearSystem):
    """Return a :class:`Solution` or a :class:`FarkasCertificate`, never both.

    The result is re-verified by exact substitution before being returned.
    """
    system.validate()
    n = system.num_vars
    A = []
    for row in system.rows:
        coeffs = list(row.coeffs)
        if system.has_free_constant:
            # a.z - C+ + C- (>=|=) b
            coeffs += [Fraction(-1), Fraction(1)]
        A.append(coeffs)
    b = [row.rhs for row in system.rows]
    kinds = [row.kind for row in system.rows]
    if not A:
        return Solution(z=tuple([Fraction(0)] * n), C=Fraction(0))
    tag, vec = _phase_one(A, b, kinds)
    if tag == "x":
        z = tuple(vec[:n])
        C = vec[n] - vec[n + 1] if system.has_free_constant else Fraction(0)
        out = Solution(z=z, C=C)
        if not check_solution(system, out):
            raise InternalContradiction("simplex returned a non-solution")
        return out
    cert = FarkasCertificate(y=tuple(vec))
    if not check_certificate(system, cert):
        raise InternalContradiction("simplex returned an invalid certificate")
    return cert


def solve_gordan(num_vars: int, rows: Sequence[Sequence]):
    """Gordan's alternative for ``A z = 0``.

    Returns :class:`GordanSolution` (``z >= 0``, ``z != 0``, ``A z = 0``) or a
    :class:`SeparatingVector` ``y`` with ``sum_j y_j a_ij > 0`` for every ``i``.
    """
    mat = []
    for j, r in enumerate(rows):
        if len(r) != num_vars:
            raise MalformedSystem(f"expected {num_vars} coefficients, got {len(r)}", f"rows[{j}]")
        mat.append([Fraction(c) for c in r])
    if num_vars == 0:
        # only z = () exists, which is zero; y = anything separates vacuously
        return SeparatingVector(y=tuple(Fraction(0) for _ in mat))
    A = mat + [[Fraction(1)] * num_vars]
    b = [Fraction(0)] * len(mat) + [Fraction(1)]
    kinds = [Kind.EQ] * len(A)
    tag, vec = _phase_one(A, b, kinds)
    if tag == "x":
        z = tuple(vec)
        assert all(sum(a * v for a, v in zip(r, z)) == 0 for r in mat)
        return GordanSolution(z=z)
    y = tuple(-v for v in vec[:-1])
    for i in range(num_vars):
        if sum(yj * r[i] for yj, r in zip(y, mat)) <= 0:
            raise InternalContradiction("invalid Gordan separating vector")
    return SeparatingVector(y=y)


def feasible_point(rows: Sequence[Row], num_vars: int):
    """Plain feasibility of ``rows`` over ``z >= 0`` (no free constant).

    Returns the point as a tuple of Fractions, or None when infeasible.
    """
    result = solve_farkas(LinearSystem(num_vars, rows, has_free_constant=False))
    if isinstance(result, Solution):
        return result.z
    return None
