"""Exact two-phase simplex on Fractions with Bland's anti-cycling rule.

Solves  min c.x  subject to  A x = b,  x >= 0.
"""

from dataclasses import dataclass
from fractions import Fraction

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass
class LPResult:
    status: str
    value: Fraction = None
    x: tuple = None

    @property
    def ok(self):
        return self.status == OPTIMAL


def _pivot(T, obj, basis, r, c):
    row = T[r]
    p = row[c]
    if p != 1:
        row = [v / p for v in row]
        T[r] = row
    nz = [(j, v) for j, v in enumerate(row) if v != 0]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f != 0:
                for j, v in nz:
                    other[j] -= f * v
    f = obj[c]
    if f != 0:
        for j, v in nz:
            obj[j] -= f * v
    basis[r] = c


def _iterate(T, obj, basis, allowed):
    """Run Bland's rule until optimal; obj holds reduced costs, obj[-1] = -value."""
    while True:
        c = next((j for j in allowed if obj[j] < 0), None)
        if c is None:
            return OPTIMAL
        best, r = None, None
        for i, row in enumerate(T):
            a = row[c]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                    best, r = ratio, i
        if r is None:
            return UNBOUNDED
        _pivot(T, obj, basis, r, c)


def solve_lp(c, A, b):
    """Minimise c.x over {x >= 0 : A x = b}; exact."""
    n = len(c)
    c = [Fraction(v) for v in c]
    rows = []
    for row, bi in zip(A, b):
        row = [Fraction(v) for v in row]
        bi = Fraction(bi)
        if bi < 0:
            row, bi = [-v for v in row], -bi
        rows.append((row, bi))
    m = len(rows)
    # phase 1: artificial variable per row
    T = [row + [Fraction(int(i == k)) for k in range(m)] + [bi]
         for i, (row, bi) in enumerate(rows)]
    basis = [n + i for i in range(m)]
    obj = [Fraction(0)] * (n + m + 1)
    for row in T:
        for j in range(n):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    _iterate(T, obj, basis, range(n + m))
    if obj[-1] != 0:
        return LPResult(INFEASIBLE)
    # drive artificials out; drop redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            c_in = next((j for j in range(n) if T[i][j] != 0), None)
            if c_in is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, obj, basis, i, c_in)
        i += 1
    T = [row[:n] + [row[-1]] for row in T]
    obj = c + [Fraction(0)]
    for i, bv in enumerate(basis):
        f = obj[bv]
        if f != 0:
            row = T[i]
            for j in range(n + 1):
                obj[j] -= f * row[j]
    status = _iterate(T, obj, basis, range(n))
    if status != OPTIMAL:
        return LPResult(status)
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    return LPResult(OPTIMAL, -obj[-1], tuple(x))
