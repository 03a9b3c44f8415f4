"""Fraction-free integer row reduction (pure-Python reference kernel).

This is the hot loop of the whole package: every kernel, image, rank and
solve in ``lagfloor.linalg`` funnels into :func:`row_reduce`.  A compiled
Cython twin lives in ``_rowreduce.pyx``; both must produce bit-identical
output (the canonical integer RREF), which the test suite checks.

Rows are lists of Python ints, so there is no overflow anywhere.  During
elimination a row is combined as ``p*row - x*pivot_row``; to keep entries
from swelling, a row is divided by its gcd whenever some entry grows past
``NORMALIZE_BITS`` bits.  The final pass always reduces every row to its
primitive form (coprime entries, positive pivot), so the output is canonical
regardless of when interim normalizations fired.
"""

from math import gcd

NORMALIZE_BITS = 64


def _row_gcd(row):
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return 1
    return g


def _make_primitive(row, pivot_col):
    g = _row_gcd(row)
    if g == 0:
        return row
    if row[pivot_col] < 0:
        g = -g
    if g != 1:
        row = [x // g for x in row]
    return row


def row_reduce(rows, ncols):
    """Gauss-Jordan eliminate integer ``rows`` in place of a copy.

    Returns ``(pivots, reduced)`` where ``pivots`` is the ascending list of
    pivot columns and ``reduced`` the corresponding primitive integer rows of
    the reduced echelon form.  Pivot choice is the first row with a nonzero
    entry in the scanned column, so the result is deterministic.
    """
    work = [list(r) for r in rows]
    nrows = len(work)
    pivots = []
    rank = 0
    for col in range(ncols):
        sel = -1
        for r in range(rank, nrows):
            if work[r][col]:
                sel = r
                break
        if sel < 0:
            continue
        if sel != rank:
            work[rank], work[sel] = work[sel], work[rank]
        prow = _make_primitive(work[rank], col)
        work[rank] = prow
        p = prow[col]
        for r in range(nrows):
            if r == rank:
                continue
            row = work[r]
            x = row[col]
            if not x:
                continue
            new = [p * a - x * b for a, b in zip(row, prow)]
            big = False
            for v in new:
                if v and v.bit_length() > NORMALIZE_BITS:
                    big = True
                    break
            if big:
                g = _row_gcd(new)
                if g > 1:
                    new = [v // g for v in new]
            work[r] = new
        pivots.append(col)
        rank += 1
    reduced = [_make_primitive(work[i], pivots[i]) for i in range(rank)]
    return pivots, reduced
