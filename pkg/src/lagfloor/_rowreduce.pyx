# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled twin of ``_rowreduce_py.row_reduce``.

Same algorithm, same canonical output; entries stay Python ints (arbitrary
precision), the speedup comes from running the elimination loops in C and
skipping interpreter overhead on list access.
"""

from math import gcd


cdef long NORMALIZE_BITS = 64


cdef object _row_gcd(list row):
    cdef Py_ssize_t i, n = len(row)
    g = 0
    for i in range(n):
        x = row[i]
        if x:
            g = gcd(g, x)
            if g == 1:
                return 1
    return g


cdef list _make_primitive(list row, Py_ssize_t pivot_col):
    cdef Py_ssize_t i, n = len(row)
    g = _row_gcd(row)
    if g == 0:
        return row
    if row[pivot_col] < 0:
        g = -g
    if g != 1:
        return [row[i] // g for i in range(n)]
    return row


def row_reduce(rows, Py_ssize_t ncols):
    """See ``lagfloor._rowreduce_py.row_reduce``; identical contract."""
    cdef list work = [list(input_row) for input_row in rows]
    cdef Py_ssize_t nrows = len(work)
    cdef list pivots = []
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t col, r, sel, j
    cdef list prow, row, new
    cdef bint big
    for col in range(ncols):
        sel = -1
        for r in range(rank, nrows):
            if (<list>work[r])[col]:
                sel = r
                break
        if sel < 0:
            continue
        if sel != rank:
            work[rank], work[sel] = work[sel], work[rank]
        prow = _make_primitive(<list>work[rank], col)
        work[rank] = prow
        p = prow[col]
        for r in range(nrows):
            if r == rank:
                continue
            row = <list>work[r]
            x = row[col]
            if not x:
                continue
            new = [0] * ncols
            big = False
            for j in range(ncols):
                v = p * row[j] - x * prow[j]
                new[j] = v
                if v and (<object>v).bit_length() > NORMALIZE_BITS:
                    big = True
            if big:
                g = _row_gcd(new)
                if g > 1:
                    new = [new[j] // g for j in range(ncols)]
            work[r] = new
        pivots.append(col)
        rank += 1
    cdef list reduced = []
    for r in range(rank):
        reduced.append(_make_primitive(<list>work[r], <Py_ssize_t>pivots[r]))
    return pivots, reduced
