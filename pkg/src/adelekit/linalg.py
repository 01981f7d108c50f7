"""Dense exact linear algebra over a :class:`~adelekit.fields.Field`.

Matrices are lists of rows.  Everything is Gaussian elimination; sizes in
this package stay in the low hundreds.
"""

from __future__ import annotations

from .fields import Field


def zeros(field: Field, m: int, n: int):
    return [[field.zero] * n for _ in range(m)]


def identity(field: Field, n: int):
    M = zeros(field, n, n)
    for i in range(n):
        M[i][i] = field.one
    return M


def matmul(field: Field, A, B):
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = zeros(field, len(A), n)
    for i, row in enumerate(A):
        acc = out[i]
        for k, a in enumerate(row):
            if a == field.zero:
                continue
            for j, b in enumerate(B[k]):
                if b != field.zero:
                    acc[j] = field.add(acc[j], field.mul(a, b))
    return out


def matadd(field: Field, A, B, sign: int = 1):
    op = field.add if sign > 0 else field.sub
    return [[op(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def is_zero_matrix(field: Field, A) -> bool:
    return all(x == field.zero for row in A for x in row)


def hstack(field: Field, *blocks):
    rows = max((len(b) for b in blocks), default=0)
    return [sum((list(b[i]) for b in blocks), []) for i in range(rows)]


def transpose(A, ncols: int | None = None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*A)]


def rref(field: Field, A):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    if field.char:
        return _rref_mod_p(A, field.char)
    R = [list(r) for r in A]
    m = len(R)
    n = len(R[0]) if m else 0
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if R[r][col] != field.zero), None)
        if piv is None:
            continue
        R[row], R[piv] = R[piv], R[row]
        inv = field.inv(R[row][col])
        R[row] = [field.mul(x, inv) for x in R[row]]
        prow = R[row]
        for r in range(m):
            if r != row and R[r][col] != field.zero:
                c = R[r][col]
                R[r] = [field.sub(x, field.mul(c, y)) for x, y in zip(R[r], prow)]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return R, pivots


def _rref_mod_p(A, p):
    R = [list(r) for r in A]
    m = len(R)
    n = len(R[0]) if m else 0
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if R[r][col]), None)
        if piv is None:
            continue
        R[row], R[piv] = R[piv], R[row]
        inv = pow(R[row][col], p - 2, p)
        prow = R[row] = [x * inv % p for x in R[row]]
        nz = [j for j in range(col, n) if prow[j]]
        for r in range(m):
            if r != row:
                rr = R[r]
                c = rr[col]
                if c:
                    for j in nz:
                        rr[j] = (rr[j] - c * prow[j]) % p
        pivots.append(col)
        row += 1
        if row == m:
            break
    return R, pivots


def rank(field: Field, A) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(field, A)[1])


def nullspace(field: Field, A, ncols: int | None = None):
    """Basis of {x : A x = 0} as a list of column vectors."""
    n = len(A[0]) if A else (ncols or 0)
    if not A:
        return [[field.one if i == j else field.zero for i in range(n)] for j in range(n)]
    R, pivots = rref(field, A)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = []
    for fcol in free:
        v = [field.zero] * n
        v[fcol] = field.one
        for r, pcol in enumerate(pivots):
            v[pcol] = field.neg(R[r][fcol])
        basis.append(v)
    return basis


def solve(field: Field, A, b):
    """One solution x of A x = b, or None if inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [field.zero] * n
    aug = [list(A[i]) + [b[i]] for i in range(m)]
    R, pivots = rref(field, aug)
    if n in pivots:
        return None
    x = [field.zero] * n
    for r, pcol in enumerate(pivots):
        x[pcol] = R[r][n]
    return x


def inverse(field: Field, A):
    n = len(A)
    aug = [list(A[i]) + [field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    R, pivots = rref(field, aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def matvec(field: Field, A, v):
    out = []
    for row in A:
        acc = field.zero
        for a, x in zip(row, v):
            if a != field.zero and x != field.zero:
                acc = field.add(acc, field.mul(a, x))
        out.append(acc)
    return out


def sparse_apply(field: Field, A, vectors):
    """[A v for v in vectors], skipping zero entries of A."""
    zero = field.zero
    rows = [[(j, a) for j, a in enumerate(row) if a != zero] for row in A]
    out = []
    for v in vectors:
        nz = {j: x for j, x in enumerate(v) if x != zero}
        img = []
        for row in rows:
            acc = zero
            for j, a in row:
                x = nz.get(j)
                if x is not None:
                    acc = field.add(acc, field.mul(a, x))
            img.append(acc)
        out.append(img)
    return out
