"""Exact integer and rational linear algebra.

Matrices are plain lists of row lists; integer matrices hold Python ints,
rational matrices hold Fractions (always exact).  Everything here is a pure
function and deterministic: given the same input, pivots are chosen by a
fixed rule, so callers can rely on reproducible bases and normal forms.
"""

from fractions import Fraction
from math import gcd


# ---------------------------------------------------------------------------
# basic matrix helpers


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(rows, cols):
    return [[0] * cols for _ in range(rows)]


def mat_shape(A):
    return len(A), len(A[0]) if A else 0


def mat_mul(A, B):
    n, k = len(A), len(B)
    m = len(B[0]) if B else 0
    out = []
    for i in range(n):
        Ai = A[i]
        row = [0] * m
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(m):
                    if Bt[j]:
                        row[j] += a * Bt[j]
        out.append(row)
    return out


def mat_vec(A, v):
    out = []
    for row in A:
        s = 0
        for a, x in zip(row, v):
            if a and x:
                s += a * x
        out.append(s)
    return out


def transpose(A):
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def is_zero_matrix(A):
    return all(all(x == 0 for x in row) for row in A)


def check_int_matrix(A):
    """Validate a dense integer matrix: rectangular, int entries."""
    width = {len(row) for row in A}
    if len(width) > 1:
        raise ValueError("ragged integer matrix")
    for row in A:
        for x in row:
            if not isinstance(x, int):
                raise ValueError(f"non-integer entry {x!r} in integer matrix")
    return A


def check_q_matrix(A):
    """Validate a rational matrix and normalise entries to Fraction.

    Fractions are kept in lowest terms with positive denominator by the
    Fraction type itself, which is exactly the QMatrix invariant.
    """
    width = {len(row) for row in A}
    if len(width) > 1:
        raise ValueError("ragged rational matrix")
    return [[Fraction(x) for x in row] for row in A]


# ---------------------------------------------------------------------------
# rational elimination (sparse rows, exact)


def _sparse_rows(A):
    rows = []
    for row in A:
        rows.append({j: Fraction(x) for j, x in enumerate(row) if x})
    return rows


def _eliminate(rows, ncols):
    """Full Gauss-Jordan elimination on sparse Fraction rows, in place.

    Returns the list of (pivot_row_index, pivot_col) in the order the
    pivots were produced.  Deterministic: columns are processed left to
    right; among candidate rows the sparsest wins, ties by row index.
    """
    pivots = []
    pivot_of_row = {}
    for col in range(ncols):
        best = None
        for i, row in enumerate(rows):
            if i in pivot_of_row or col not in row:
                continue
            key = (len(row), i)
            if best is None or key < best[0]:
                best = (key, i)
        if best is None:
            continue
        i = best[1]
        piv = rows[i][col]
        if piv != 1:
            rows[i] = {j: x / piv for j, x in rows[i].items()}
        for k, other in enumerate(rows):
            if k == i or col not in other:
                continue
            c = other[col]
            new = dict(other)
            for j, x in rows[i].items():
                val = new.get(j, Fraction(0)) - c * x
                if val:
                    new[j] = val
                else:
                    new.pop(j, None)
            rows[k] = new
        pivot_of_row[i] = col
        pivots.append((i, col))
    return pivots


def rank_q(A):
    if not A or not A[0]:
        return 0
    rows = _sparse_rows(A)
    return len(_eliminate(rows, len(A[0])))


def q_kernel_basis(A, ncols=None):
    """Basis of {x in Q^cols : A x = 0} as a list of Fraction vectors.

    The basis vectors carry a 1 in their free coordinate; count equals
    cols - rank(A) (rank-nullity).
    """
    if ncols is None:
        ncols = len(A[0]) if A else 0
    rows = _sparse_rows(A)
    pivots = _eliminate(rows, ncols)
    pivot_cols = {col: i for i, col in pivots}
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for col, i in pivot_cols.items():
            if f in rows[i]:
                vec[col] = -rows[i][f]
        basis.append(vec)
    return basis


def q_solve(A, b):
    """One rational solution of A x = b, or None if inconsistent."""
    ncols = len(A[0]) if A else 0
    rows = _sparse_rows(A)
    for i, bi in enumerate(b):
        if bi:
            rows[i][ncols] = Fraction(bi)
    pivots = _eliminate(rows, ncols)
    pivot_rows = {i for i, _ in pivots}
    for i, row in enumerate(rows):
        if i not in pivot_rows and ncols in row:
            return None
    x = [Fraction(0)] * ncols
    for i, col in pivots:
        x[col] = rows[i].get(ncols, Fraction(0))
    return x


# ---------------------------------------------------------------------------
# Smith normal form


def _min_abs_pivot(A, t, m, n):
    best = None
    for i in range(t, m):
        for j in range(t, n):
            a = A[i][j]
            if a:
                key = (abs(a), i, j)
                if best is None or key < best:
                    best = key
    return best


def _row_op(A, U, i, k, q):
    # row_i -= q * row_k   (and mirror on U)
    if q == 0:
        return
    Ai, Ak = A[i], A[k]
    for j in range(len(Ai)):
        Ai[j] -= q * Ak[j]
    Ui, Uk = U[i], U[k]
    for j in range(len(Ui)):
        Ui[j] -= q * Uk[j]


def _col_op(A, V, j, k, q):
    # col_j -= q * col_k   (and mirror on V)
    if q == 0:
        return
    for row in A:
        row[j] -= q * row[k]
    for row in V:
        row[j] -= q * row[k]


def smith_normal_form(A):
    """Smith normal form with transforms: returns (U, D, V), U A V = D.

    U and V are unimodular; D is diagonal with d1 | d2 | ... | dr > 0 and
    zeros afterwards.  Pivot selection always takes the smallest absolute
    value in the remaining block (ties by position), which keeps entry
    growth tame on the sparse cochain matrices this package produces.
    """
    check_int_matrix(A)
    m, n = len(A), (len(A[0]) if A else 0)
    D = [list(row) for row in A]
    U = identity_matrix(m)
    V = identity_matrix(n)
    t = 0
    while t < min(m, n):
        best = _min_abs_pivot(D, t, m, n)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            D[t], D[pi] = D[pi], D[t]
            U[t], U[pi] = U[pi], U[t]
        if pj != t:
            for row in D:
                row[t], row[pj] = row[pj], row[t]
            for row in V:
                row[t], row[pj] = row[pj], row[t]
        # clear column t and row t; restart if a remainder improves the pivot
        dirty = False
        for i in range(t + 1, m):
            if D[i][t]:
                q = D[i][t] // D[t][t]
                _row_op(D, U, i, t, q)
                if D[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if D[t][j]:
                q = D[t][j] // D[t][t]
                _col_op(D, V, j, t, q)
                if D[t][j]:
                    dirty = True
        if dirty:
            continue
        # pivot must divide the remaining block
        offender = None
        d = D[t][t]
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if D[i][j] % d:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            _row_op(D, U, t, offender, -1)
            continue
        if d < 0:
            for j in range(n):
                D[t][j] = -D[t][j]
            for j in range(m):
                U[t][j] = -U[t][j]
        t += 1
    return U, D, V


def snf_diagonal(A):
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def solve_integer(A, b):
    """Integer solution x of A x = b, or None.  Decided via the Smith form."""
    check_int_matrix(A)
    m, n = len(A), (len(A[0]) if A else 0)
    if len(b) != m:
        raise ValueError("shape mismatch in solve_integer")
    U, D, V = smith_normal_form(A)
    c = mat_vec(U, list(b))
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d:
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i]:
            return None
    return mat_vec(V, y)


def integral_kernel(A):
    """Basis of the full lattice {x in Z^cols : A x = 0} for rational A.

    Each equation is scaled to integers first (same solution set); the
    kernel columns of the Smith V-transform then give a basis of the
    saturated kernel lattice because V is unimodular.
    """
    if not A:
        return []
    n = len(A[0])
    rows = []
    for row in A:
        fr = [Fraction(x) for x in row]
        mult = 1
        for x in fr:
            mult = mult * x.denominator // gcd(mult, x.denominator)
        rows.append([int(x * mult) for x in fr])
    U, D, V = smith_normal_form(rows)
    m = len(rows)
    rank = sum(1 for i in range(min(m, n)) if D[i][i])
    cols = transpose(V)
    return [cols[j] for j in range(rank, n)]


def saturate_lattice(gens, n):
    """Basis of (Q-span of gens) cap Z^n, the saturation of a lattice.

    gens may have rational entries.  Computed as the integral kernel of a
    rational system cutting out the span.
    """
    gens = [g for g in gens if any(x for x in g)]
    if not gens:
        return []
    # span(gens) = {x : N x = 0} where N's rows form a basis of the
    # annihilator {y : g . y = 0 for all generators g}
    N = q_kernel_basis(gens, n)
    if not N:
        return identity_matrix(n)
    return integral_kernel(N)


def hermite_row_basis(gens):
    """Canonical upper-echelon basis of the integer row lattice of gens.

    Returns (basis, expr) where each basis row is a primitive description
    of the lattice and expr[i] gives integer coefficients expressing
    basis[i] in terms of the original generators.
    """
    if not gens:
        return [], []
    n = len(gens[0])
    rows = [list(g) for g in gens]
    expr = identity_matrix(len(gens))
    m = len(rows)
    # integer row echelon via gcd steps, deterministic
    pivot_row = 0
    for col in range(n):
        if pivot_row == m:
            break
        while True:
            cand = [i for i in range(pivot_row, m) if rows[i][col]]
            if not cand:
                break
            i0 = min(cand, key=lambda i: (abs(rows[i][col]), i))
            if i0 != pivot_row:
                rows[pivot_row], rows[i0] = rows[i0], rows[pivot_row]
                expr[pivot_row], expr[i0] = expr[i0], expr[pivot_row]
            a = rows[pivot_row][col]
            for i in range(pivot_row + 1, m):
                if rows[i][col]:
                    q = rows[i][col] // a
                    for j in range(n):
                        rows[i][j] -= q * rows[pivot_row][j]
                    for j in range(len(expr[i])):
                        expr[i][j] -= q * expr[pivot_row][j]
            if all(rows[i][col] == 0 for i in range(pivot_row + 1, m)):
                break
        if rows[pivot_row][col] if pivot_row < m else False:
            pivot_row += 1
    basis, bexpr = [], []
    for i, row in enumerate(rows):
        if any(row):
            basis.append(row)
            bexpr.append(expr[i])
    # normalise: positive pivots, reduce entries above each pivot
    for i in range(len(basis)):
        piv = next(j for j in range(n) if basis[i][j])
        if basis[i][piv] < 0:
            basis[i] = [-x for x in basis[i]]
            bexpr[i] = [-x for x in bexpr[i]]
        for k in range(i):
            if basis[k][piv]:
                q = basis[k][piv] // basis[i][piv]
                if q:
                    basis[k] = [a - q * b for a, b in zip(basis[k], basis[i])]
                    bexpr[k] = [a - q * b for a, b in zip(bexpr[k], bexpr[i])]
    return basis, bexpr


def lattice_coords(basis, v):
    """Integer coordinates of v in an echelon lattice basis, or None.

    basis must be echelon (as produced by hermite_row_basis); v may be
    rational, in which case None is returned unless v lies in the lattice.
    """
    v = [Fraction(x) for x in v]
    coords = [0] * len(basis)
    for i, row in enumerate(basis):
        piv = next(j for j in range(len(row)) if row[j])
        c = v[piv] / row[piv]
        if c.denominator != 1:
            return None
        c = int(c)
        coords[i] = c
        if c:
            v = [a - c * Fraction(b) for a, b in zip(v, row)]
    if any(v):
        return None
    return coords


# ---------------------------------------------------------------------------
# oracles used by the test-suite (intentionally independent algorithms)


def minor_gcd(A, k):
    """gcd of all k x k minors of A (0 if none are nonzero).

    Brute-force oracle for Smith normal form invariant factors: the product
    of the first k diagonal entries of the Smith form equals this gcd.
    Only viable for small matrices.
    """
    from itertools import combinations

    m, n = len(A), (len(A[0]) if A else 0)
    if k == 0:
        return 1
    g = 0
    for rows in combinations(range(m), k):
        for cols in combinations(range(n), k):
            g = gcd(g, _det([[A[i][j] for j in cols] for i in rows]))
    return g


def _det(A):
    n = len(A)
    if n == 1:
        return A[0][0]
    total = 0
    for j in range(n):
        if A[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in A[1:]]
            total += (-1) ** j * A[0][j] * _det(minor)
    return total
