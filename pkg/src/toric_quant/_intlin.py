"""Exact integer and rational linear algebra for the combinatorial layer.

Everything here works on plain ints and fractions.Fraction so that lattice
counts, vertex coordinates and chart bases come out exact.  Floating point
enters only in the analytic modules.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


def is_primitive(vec) -> bool:
    g = 0
    for v in vec:
        g = gcd(g, abs(int(v)))
    return g == 1


def integer_det(rows) -> int:
    """Determinant of a square integer matrix via fraction-free Bareiss."""
    m = [[int(v) for v in r] for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def rational_solve(A, b):
    """Solve the square system A x = b exactly.  Raises on singular A."""
    n = len(A)
    M = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise ValueError("singular system")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [vr - f * vc for vr, vc in zip(M[r], M[c])]
    return tuple(M[i][n] for i in range(n))


def rational_rank(A) -> int:
    rows = [[Fraction(v) for v in r] for r in A]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for c in range(ncols):
        p = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        piv = rows[rank][c]
        rows[rank] = [v / piv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [vr - f * vc for vr, vc in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _normalize_row(row):
    lead = next((v for v in row if v != 0), 1)
    if lead < 0:
        row = [-v for v in row]
    return row


def integer_kernel_basis(A, ncols=None):
    """Z-basis of {v in Z^n : A v = 0}, returned as rows.

    Row-reduces [A^T | I] over the integers; rows whose A^T-part vanishes
    carry the basis in the identity part.  Works for any integer A, in
    particular empty A (kernel = Z^n).
    """
    A = [list(map(int, row)) for row in A]
    k = len(A)
    if ncols is None:
        if k == 0:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(A[0])
    n = ncols
    M = [[A[i][j] for i in range(k)] + [1 if t == j else 0 for t in range(n)]
         for j in range(n)]
    pivot = 0
    for c in range(k):
        while True:
            live = [r for r in range(pivot, n) if M[r][c] != 0]
            if not live:
                break
            if len(live) == 1:
                r = live[0]
                M[pivot], M[r] = M[r], M[pivot]
                pivot += 1
                break
            live.sort(key=lambda r: abs(M[r][c]))
            s = live[0]
            for r in live[1:]:
                q = M[r][c] // M[s][c]
                if q:
                    M[r] = [vr - q * vs for vr, vs in zip(M[r], M[s])]
    basis = [_normalize_row(M[r][k:]) for r in range(pivot, n)]
    basis.sort()
    return tuple(tuple(v) for v in basis)


def column_hermite(A):
    """Column echelon form over Z: returns (H, V) with A @ V = H = [L | 0].

    V is unimodular, L is k x k lower triangular with positive diagonal
    (A must have full row rank k).
    """
    H = [list(map(int, row)) for row in A]
    k = len(H)
    n = len(H[0])
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_sub(dst, src, q):
        for i in range(k):
            H[i][dst] -= q * H[i][src]
        for i in range(n):
            V[i][dst] -= q * V[i][src]

    def col_swap(a, b):
        for i in range(k):
            H[i][a], H[i][b] = H[i][b], H[i][a]
        for i in range(n):
            V[i][a], V[i][b] = V[i][b], V[i][a]

    def col_neg(a):
        for i in range(k):
            H[i][a] = -H[i][a]
        for i in range(n):
            V[i][a] = -V[i][a]

    for r in range(k):
        while True:
            live = [c for c in range(r, n) if H[r][c] != 0]
            if not live:
                raise ValueError("matrix does not have full row rank")
            if len(live) == 1:
                c = live[0]
                if c != r:
                    col_swap(r, c)
                if H[r][r] < 0:
                    col_neg(r)
                break
            live.sort(key=lambda c: abs(H[r][c]))
            s = live[0]
            for c in live[1:]:
                q = H[r][c] // H[r][s]
                if q:
                    col_sub(c, s, q)
    return H, V


def unimodular_inverse(M):
    """Exact inverse of a unimodular integer matrix, as integer rows."""
    n = len(M)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        cols.append(rational_solve(M, e))
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            v = cols[j][i]
            if v.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(v))
        inv.append(tuple(row))
    return tuple(inv)


def matmul_int(A, B):
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in zip(*B))
                 for row in A)
