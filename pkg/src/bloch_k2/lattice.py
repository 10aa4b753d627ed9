"""Integer lattice helpers: LLL reduction, integer relation search, and Smith
normal form with unimodular transforms."""

from __future__ import annotations

from typing import List, Sequence, Tuple

import mpmath
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

IntMatrix = List[List[int]]


def lll(rows: Sequence[Sequence[int]], delta: Tuple[int, int] = (99, 100)) -> IntMatrix:
    """LLL-reduce the lattice spanned by the (independent) integer rows."""
    rows = [list(map(int, r)) for r in rows]
    if not rows:
        return []
    m = DomainMatrix([[ZZ(v) for v in r] for r in rows], (len(rows), len(rows[0])), ZZ)
    reduced = m.lll(delta=QQ(*delta))
    return [[int(v) for v in r] for r in reduced.to_list()]


def integer_relations(vectors: Sequence[Sequence], scale_digits: int,
                      max_coeff: int = 64) -> List[List[int]]:
    """Candidate integer relations among real vectors.

    ``vectors[i]`` is a list of real numbers (one coordinate per equation).
    Returns short integer vectors ``e`` with ``sum_i e_i * vectors[i] ~ 0``
    whose entries are bounded by ``max_coeff``. Candidates are numerical
    evidence only; callers must verify them exactly.
    """
    k = len(vectors)
    if k == 0:
        return []
    rows = []
    with mpmath.workdps(scale_digits + 20):
        scale = mpmath.mpf(10) ** scale_digits
        for i, vec in enumerate(vectors):
            ident = [1 if j == i else 0 for j in range(k)]
            rows.append(ident + [int(mpmath.nint(scale * v)) for v in vec])
    reduced = lll(rows)
    # residual of a genuine relation is O(k * max_coeff) after rounding
    slack = 4 * k * max_coeff
    out = []
    for r in reduced:
        coeffs, resid = r[:k], r[k:]
        if all(c == 0 for c in coeffs):
            continue
        if max(abs(c) for c in coeffs) > max_coeff:
            continue
        if all(abs(v) <= slack for v in resid):
            out.append(coeffs)
    return out


def _swap_rows(m: IntMatrix, i: int, j: int) -> None:
    m[i], m[j] = m[j], m[i]


def _swap_cols(m: IntMatrix, i: int, j: int) -> None:
    for row in m:
        row[i], row[j] = row[j], row[i]


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (D, P, Q) with P * A * Q = D, P and Q unimodular, D diagonal
    with d_1 | d_2 | ... .

    Pivot choice is deterministic: smallest nonzero absolute value in the
    remaining block, ties broken by lowest row then lowest column index.
    """
    d = [list(map(int, r)) for r in a]
    m = len(d)
    n = len(d[0]) if m else 0
    p = _identity(m)
    q = _identity(n)

    def add_row(dst: int, src: int, c: int) -> None:
        if c:
            d[dst] = [x + c * y for x, y in zip(d[dst], d[src])]
            p[dst] = [x + c * y for x, y in zip(p[dst], p[src])]

    def add_col(dst: int, src: int, c: int) -> None:
        if c:
            for row in d:
                row[dst] += c * row[src]
            for row in q:
                row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if d[i][j] and (pivot is None or abs(d[i][j]) < abs(d[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                return d, p, q
            i, j = pivot
            _swap_rows(d, t, i)
            _swap_rows(p, t, i)
            _swap_cols(d, t, j)
            _swap_cols(q, t, j)
            piv = d[t][t]
            done = True
            for i in range(t + 1, m):
                add_row(i, t, -(d[i][t] // piv))
                if d[i][t]:
                    done = False
            for j in range(t + 1, n):
                add_col(j, t, -(d[t][j] // piv))
                if d[t][j]:
                    done = False
            if not done:
                continue
            # divisibility condition on the remaining block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if d[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            p[t] = [-x for x in p[t]]
    return d, p, q


def inverse_unimodular(u: Sequence[Sequence[int]]) -> IntMatrix:
    n = len(u)
    m = DomainMatrix([[ZZ(v) for v in r] for r in u], (n, n), ZZ).convert_to(QQ)
    return [[int(v) for v in r] for r in m.inv().to_list()]


def saturate(rows: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """Basis of (span_Q rows) intersected with Z^n."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    d, p, q = smith_normal_form(rows)
    rank = sum(1 for i in range(min(len(d), n)) if d[i][i] != 0)
    # rows span L = D Q^-1 (up to P); saturation is spanned by the first
    # `rank` rows of Q^-1
    qinv = inverse_unimodular(q)
    return [qinv[i] for i in range(rank)]
