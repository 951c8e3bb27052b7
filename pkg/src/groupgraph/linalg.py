"""Exact linear algebra over the rationals.

Matrices are lists of rows of Fractions; a matrix with zero rows or zero
columns is legal and shows up constantly (trivial vector spaces).  Everything
here is exact: no tolerances anywhere.
"""

from __future__ import annotations

from fractions import Fraction

Vector = list[Fraction]
Matrix = list[list[Fraction]]


def frac(x) -> Fraction:
    """Coerce ints, strings like '2/3' and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def mat(rows) -> Matrix:
    return [[frac(x) for x in row] for row in rows]


def shape(m: Matrix, ncols: int | None = None) -> tuple[int, int]:
    if m:
        return len(m), len(m[0])
    return 0, 0 if ncols is None else ncols


def zeros(nrows: int, ncols: int) -> Matrix:
    return [[Fraction(0)] * ncols for _ in range(nrows)]


def identity(n: int) -> Matrix:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_vec(m: Matrix, v: Vector) -> Vector:
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in m]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    # a: r x k, b: k x c.  Empty dimensions compose to zero matrices.
    r = len(a)
    k = len(a[0]) if a else 0
    c = len(b[0]) if b else 0
    return [
        [sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(c)]
        for i in range(r)
    ]


def transpose(m: Matrix, ncols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(ncols)] if ncols else []
    return [list(col) for col in zip(*m)]


def vec_add(u: Vector, v: Vector) -> Vector:
    return [a + b for a, b in zip(u, v)]


def vec_sub(u: Vector, v: Vector) -> Vector:
    return [a - b for a, b in zip(u, v)]


def vec_neg(u: Vector) -> Vector:
    return [-a for a in u]


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (R, pivot column indices)."""
    r = [row[:] for row in m]
    nrows = len(r)
    ncols = len(r[0]) if r else 0
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        pivot = next((i for i in range(row, nrows) if r[i][col] != 0), None)
        if pivot is None:
            continue
        r[row], r[pivot] = r[pivot], r[row]
        inv = 1 / r[row][col]
        r[row] = [x * inv for x in r[row]]
        for i in range(nrows):
            if i != row and r[i][col] != 0:
                f = r[i][col]
                r[i] = [a - f * b for a, b in zip(r[i], r[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return r, pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix, ncols: int) -> list[Vector]:
    """Basis of the null space of an (nrows x ncols) matrix."""
    r, pivots = rref(m)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def solve(m: Matrix, b: Vector, ncols: int) -> Vector | None:
    """One solution of m x = b, or None when inconsistent."""
    aug = [row[:] + [bv] for row, bv in zip(m, b)]
    r, pivots = rref(aug)
    pivots_in_cols = [p for p in pivots if p < ncols]
    if len(pivots_in_cols) != len(pivots):
        return None  # pivot in the augmented column
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots_in_cols):
        x[p] = r[i][ncols]
    return x


def in_span(vectors: list[Vector], v: Vector) -> bool:
    if not v:
        return True
    if not vectors:
        return all(x == 0 for x in v)
    cols = transpose(vectors)
    return solve(cols, v, len(vectors)) is not None


def is_invertible(m: Matrix, nrows: int, ncols: int) -> bool:
    return nrows == ncols and rank(m) == nrows


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [row[:] + identity(n)[i] for i, row in enumerate(m)]
    r, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is not invertible")
    return [row[n:] for row in r]


def row_space_basis(m: Matrix) -> list[Vector]:
    r, pivots = rref(m)
    return [r[i] for i in range(len(pivots))]


def extend_to_basis(vectors: list[Vector], dim: int) -> list[int]:
    """Indices of standard basis vectors completing `vectors` to a basis of Q^dim.

    Greedy in coordinate order, so deterministic.
    """
    rows = [v[:] for v in vectors]
    current = rank(rows)
    chosen = []
    for i in range(dim):
        e = [Fraction(1 if j == i else 0) for j in range(dim)]
        cand = rows + [e]
        if rank(cand) > current:
            rows = cand
            current += 1
            chosen.append(i)
        if current == dim:
            break
    return chosen


def quotient_map(sub_basis: list[Vector], dim: int) -> Matrix:
    """Matrix of a surjection Q^dim -> Q^(dim-k) whose kernel is span(sub_basis).

    Rows of the echelon form of the subspace kill the pivot coordinates; the
    free coordinates survive as the quotient coordinates.
    """
    r, pivots = rref(sub_basis)
    free = [j for j in range(dim) if j not in pivots]
    q = []
    for f in free:
        row = [Fraction(0)] * dim
        row[f] = Fraction(1)
        for i, p in enumerate(pivots):
            row[p] = -r[i][f]
        q.append(row)
    return q


def quotient_section(sub_basis: list[Vector], dim: int) -> Matrix:
    """Right inverse of quotient_map: embeds quotient coordinates on the free slots."""
    _, pivots = rref(sub_basis)
    free = [j for j in range(dim) if j not in pivots]
    sec = zeros(dim, len(free))
    for col, f in enumerate(free):
        sec[f][col] = Fraction(1)
    return sec


def kron(a: Matrix, a_shape: tuple[int, int], b: Matrix, b_shape: tuple[int, int]) -> Matrix:
    """Kronecker product with explicit shapes so empty matrices work."""
    ar, ac = a_shape
    br, bc = b_shape
    out = zeros(ar * br, ac * bc)
    for i in range(ar):
        for j in range(ac):
            for k in range(br):
                for l in range(bc):
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l]
    return out


def rank_mod_p(int_rows: list[list[int]], p: int) -> int:
    """Rank of an integer matrix over the p-element field (test oracle)."""
    rows = [[x % p for x in row] for row in int_rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    rk = 0
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, nrows) if rows[i][col] % p != 0), None)
        if piv is None:
            continue
        rows[row], rows[piv] = rows[piv], rows[row]
        inv = pow(rows[row][col], -1, p)
        rows[row] = [(x * inv) % p for x in rows[row]]
        for i in range(nrows):
            if i != row and rows[i][col] % p != 0:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[row])]
        rk += 1
        row += 1
        if row == nrows:
            break
    return rk


def frac_to_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix_to_json(m: Matrix) -> list[list]:
    return [[frac_to_json(x) for x in row] for row in m]


def matrix_from_json(rows) -> Matrix:
    return mat(rows)
