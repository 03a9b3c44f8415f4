"""Coordinate views of finite families of expressions.

Several solvers (potential finding, invariant functions, cocycle spaces,
module closures) reduce "these expressions must vanish / be dependent" to
exact linear algebra: bring everything over a common denominator, read off
monomial coordinates of the numerators, and hand the rows to ``linalg``.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import Expr, TP, TP_ONE
from .linalg import Mat, Subspace, kernel_basis, solve

F = Fraction


def tp_lcm(a: TP, b: TP) -> TP:
    """A common multiple of two trig polynomials.

    Exact lcm is not computable without gcd in this ring; divisibility-aware
    products (a, b, or a*b) cover every denominator family in scope.
    """
    if a.is_one():
        return b
    if b.is_one() or a == b:
        return a
    if a.divide_by(b) is not None:
        return a
    if b.divide_by(a) is not None:
        return b
    return a * b


def common_denominator(exprs) -> tuple[TP, list[TP]]:
    """(lcd, numerators) with expr_i = numerators[i] / lcd exactly."""
    lcd = TP_ONE
    for e in exprs:
        if not e.den.is_one():
            lcd = tp_lcm(lcd, e.den)
    if lcd.is_one():
        return lcd, [e.num for e in exprs]
    nums = []
    for e in exprs:
        if e.den is lcd or e.den == lcd:
            nums.append(e.num)
            continue
        q = lcd.divide_by(e.den)
        assert q is not None, "lcd construction guarantees divisibility"
        nums.append(e.num * q)
    return lcd, nums


class MonoIndex:
    """Growing monomial -> column index map with deterministic ordering."""

    def __init__(self):
        self.index = {}
        self.monos = []

    def key(self, mono):
        if mono not in self.index:
            self.index[mono] = len(self.monos)
            self.monos.append(mono)
        return self.index[mono]

    def vector(self, tp: TP, size=None):
        for m in tp.terms:
            self.key(m)
        n = size if size is not None else len(self.monos)
        v = [F(0)] * n
        for m, c in tp.terms.items():
            v[self.index[m]] = c
        return v

    def __len__(self):
        return len(self.monos)


def pad(rows, n):
    return [list(r) + [F(0)] * (n - len(r)) for r in rows]


def solve_linear_expr_system(columns: list[list[Expr]], rhs: list[Expr]):
    """Solve sum_k c_k * columns[k][e] = rhs[e] for every equation index e.

    Returns a tuple of Fractions or None.  Each equation is cleared to a
    common denominator, then compared monomial by monomial.
    """
    nunk = len(columns)
    neq = len(rhs)
    midx = MonoIndex()
    rows = []
    rhs_entries = []
    for e in range(neq):
        eq_exprs = [columns[k][e] for k in range(nunk)] + [rhs[e]]
        _, nums = common_denominator(eq_exprs)
        vecs = [midx.vector(num) for num in nums]
        width = max(len(v) for v in vecs)
        vecs = pad(vecs, width)
        for mono_pos in range(width):
            row = [vecs[k][mono_pos] for k in range(nunk)]
            b = vecs[nunk][mono_pos]
            if any(row) or b:
                rows.append(row)
                rhs_entries.append(b)
    if not rows:
        return tuple(F(0) for _ in range(nunk))
    m = Mat.from_rows(rows, nunk)
    return solve(m, rhs_entries)


def kernel_of_expr_system(columns: list[list[Expr]]) -> Subspace:
    """All (c_k) with sum_k c_k columns[k][e] = 0 identically for every e."""
    nunk = len(columns)
    zero_rhs = [Expr.const(columns[0][0].chart, 0)] * (len(columns[0]) if columns else 0)
    midx = MonoIndex()
    rows = []
    for e in range(len(zero_rhs)):
        eq_exprs = [columns[k][e] for k in range(nunk)]
        _, nums = common_denominator(eq_exprs)
        vecs = [midx.vector(num) for num in nums]
        width = max(len(v) for v in vecs) if vecs else 0
        vecs = pad(vecs, width)
        for mono_pos in range(width):
            row = [vecs[k][mono_pos] for k in range(nunk)]
            if any(row):
                rows.append(row)
    if not rows:
        return Subspace(
            nunk, tuple(tuple(F(i == j) for j in range(nunk)) for i in range(nunk))
        )
    return kernel_basis(Mat.from_rows(rows, nunk))


class ExprSpan:
    """Incremental linearly independent span of velocity-free expressions.

    Keeps an echelon basis over a growing monomial space, with all members
    held over a running common denominator.  Insertion order is part of the
    contract: callers rely on deterministic bases.
    """

    def __init__(self, chart):
        self.chart = chart
        self.lcd = TP_ONE
        self.members: list[Expr] = []
        self.midx = MonoIndex()
        self._echelon: list[dict] = []  # rows as {col: coeff}, pivot-normalized
        self._pivots: list[int] = []

    def _coords(self, e: Expr):
        lcd = tp_lcm(self.lcd, e.den)
        if lcd != self.lcd:
            self.lcd = lcd
            self._rebuild()
        q = self.lcd.divide_by(e.den)
        num = e.num * q
        v = {}
        for m, c in num.terms.items():
            v[self.midx.key(m)] = c
        return v

    def _rebuild(self):
        members = self.members
        self.members = []
        self._echelon = []
        self._pivots = []
        self.midx = MonoIndex()
        for m in members:
            added, _ = self.insert(m)
            assert added, "previously independent members must stay independent"

    def _reduce(self, v):
        for row, p in zip(self._echelon, self._pivots):
            c = v.get(p)
            if c:
                for col, val in row.items():
                    nv = v.get(col, F(0)) - c * val
                    if nv:
                        v[col] = nv
                    else:
                        v.pop(col, None)
        return v

    def insert(self, e: Expr):
        """Returns (added, residual_coords); residual empty when dependent."""
        if e.is_zero():
            return False, {}
        v = self._reduce(self._coords(e))
        if not v:
            return False, {}
        p = min(v)  # smallest monomial index as pivot: deterministic
        c = v[p]
        row = {col: val / c for col, val in v.items()}
        self._echelon.append(row)
        self._pivots.append(p)
        self.members.append(e)
        return True, row

    def contains(self, e: Expr):
        if e.is_zero():
            return True
        try:
            v = self._coords(e)
        except AssertionError:
            return False
        return not self._reduce(v)

    def coordinates_in_members(self, e: Expr):
        """Coefficients expressing e in the inserted members, or None."""
        if not self.members:
            return () if e.is_zero() else None
        vecs = [self._coords(m) for m in self.members] + [self._coords(e)]
        size = len(self.midx)
        dense = []
        for v in vecs:
            d = [F(0)] * size
            for col, val in v.items():
                d[col] = val
            dense.append(d)
        rows = [[dense[k][i] for k in range(len(self.members))] for i in range(size)]
        return solve(Mat.from_rows(rows, len(self.members)), [dense[-1][i] for i in range(size)])

    @property
    def dim(self):
        return len(self.members)
