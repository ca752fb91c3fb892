"""Exact linear algebra over the integers and rationals.

Matrices are tuples of row tuples; vectors are plain tuples.  Integer
matrices use Python ints (arbitrary precision), rational data uses
``fractions.Fraction``.  No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

from .errors import ToricInputError

IntMatrix = tuple[tuple[int, ...], ...]
IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]


def lcm(a: int, b: int) -> int:
    return abs(a * b) // gcd(a, b) if a and b else abs(a or b)


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a):
    return tuple(c * x for x in a)


def vec_dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def vec_gcd(a) -> int:
    g = 0
    for x in a:
        g = gcd(g, x)
    return g


def is_primitive(v: IntVector) -> bool:
    return vec_gcd(v) == 1


def primitive_part(v) -> IntVector:
    """Scale a nonzero rational vector to its primitive integer generator."""
    denom = 1
    for x in v:
        denom = lcm(denom, Fraction(x).denominator)
    ints = [int(x * denom) for x in v]
    g = vec_gcd(ints)
    if g == 0:
        raise ToricInputError("zero vector has no primitive part")
    return tuple(x // g for x in ints)


def sign_canonical(v: IntVector) -> IntVector:
    """Flip sign so the first nonzero entry is positive (for dedup keys)."""
    for x in v:
        if x > 0:
            return tuple(v)
        if x < 0:
            return tuple(-y for y in v)
    return tuple(v)


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_matrix(rows: int, cols: int) -> IntMatrix:
    return tuple((0,) * cols for _ in range(rows))


def transpose(m) -> tuple:
    return tuple(zip(*m)) if m else ()


def mat_mul(a, b) -> tuple:
    bt = transpose(b)
    return tuple(tuple(vec_dot(row, col) for col in bt) for row in a)


def mat_vec(m, v) -> tuple:
    return tuple(vec_dot(row, v) for row in m)


def mat_rank(m) -> int:
    """Rank over Q, by fraction Gaussian elimination."""
    rows = [[Fraction(x) for x in row] for row in m]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def bareiss_det(m) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve_unique(m, b) -> RatVector | None:
    """Solve m x = b for square m over Q; None if singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(m, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return tuple(row[n] for row in a)


def solve_rational(m, b) -> RatVector | None:
    """One rational solution of m x = b (free variables set to 0), or None."""
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    a = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(m, b)]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if a[i][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        for i in range(nrows):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        pivots.append(col)
        rank += 1
    for i in range(rank, nrows):
        if a[i][ncols]:
            return None
    x = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        x[col] = a[r][ncols]
    return tuple(x)


def mat_inverse(m) -> tuple[RatVector, ...]:
    """Inverse of a square matrix over Q (raises on singular input)."""
    n = len(m)
    cols = []
    for j in range(n):
        e = tuple(1 if i == j else 0 for i in range(n))
        sol = solve_unique(m, e)
        if sol is None:
            raise ToricInputError("matrix is singular")
        cols.append(sol)
    return tuple(tuple(col[i] for col in cols) for i in range(n))


def is_unimodular(m) -> bool:
    return len(m) == len(m[0]) and abs(bareiss_det(m)) == 1


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with a x + b y = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular U, V and diagonal D with U m V = D and d_i | d_{i+1}.

    Diagonal entries are nonnegative.  Classic gcd elimination; fine for the
    desk-scale matrices this library sees.
    """
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    a = [list(row) for row in m]
    u = [list(row) for row in identity_matrix(nrows)]
    v = [list(row) for row in identity_matrix(ncols)]

    def row_transform(i, j, p, q, r, s):
        # (Ri, Rj) <- (p Ri + q Rj, r Ri + s Rj), with ps - qr = ±1
        for k in range(ncols):
            a[i][k], a[j][k] = p * a[i][k] + q * a[j][k], r * a[i][k] + s * a[j][k]
        for k in range(nrows):
            u[i][k], u[j][k] = p * u[i][k] + q * u[j][k], r * u[i][k] + s * u[j][k]

    def col_transform(i, j, p, q, r, s):
        for k in range(nrows):
            a[k][i], a[k][j] = p * a[k][i] + q * a[k][j], r * a[k][i] + s * a[k][j]
        for k in range(ncols):
            v[k][i], v[k][j] = p * v[k][i] + q * v[k][j], r * v[k][i] + s * v[k][j]

    t = 0
    while t < min(nrows, ncols):
        # Pivot: nonzero entry of least magnitude in the trailing block.
        pivot = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            row_transform(t, pi, 0, 1, 1, 0)
        if pj != t:
            col_transform(t, pj, 0, 1, 1, 0)
        while True:
            for i in range(t + 1, nrows):
                if a[i][t]:
                    if a[i][t] % a[t][t] == 0:
                        q = a[i][t] // a[t][t]
                        row_transform(t, i, 1, 0, -q, 1)
                    else:
                        # gcd mixing strictly shrinks the pivot, so this loop
                        # terminates even though it can refill the pivot row
                        g, x, y = _egcd(a[t][t], a[i][t])
                        row_transform(t, i, x, y, -(a[i][t] // g), a[t][t] // g)
            if any(a[t][j] for j in range(t + 1, ncols)):
                for j in range(t + 1, ncols):
                    if a[t][j]:
                        if a[t][j] % a[t][t] == 0:
                            q = a[t][j] // a[t][t]
                            col_transform(t, j, 1, 0, -q, 1)
                        else:
                            g, x, y = _egcd(a[t][t], a[t][j])
                            col_transform(t, j, x, y, -(a[t][j] // g), a[t][t] // g)
                continue  # column ops may have refilled the pivot column
            if not any(a[i][t] for i in range(t + 1, nrows)):
                break
        d = a[t][t]
        offender = None
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if a[i][j] % d:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_transform(t, offender, 1, 1, 0, 1)
            continue
        t += 1
    for i in range(min(nrows, ncols)):
        if a[i][i] < 0:
            for k in range(ncols):
                a[i][k] = -a[i][k]
            for k in range(nrows):
                u[i][k] = -u[i][k]
    return (
        tuple(tuple(r) for r in u),
        tuple(tuple(r) for r in a),
        tuple(tuple(r) for r in v),
    )


def hnf_rows(rows) -> IntMatrix:
    """Canonical (row-style Hermite) basis of the lattice spanned by rows.

    Pivots are positive and entries above each pivot are reduced into
    [0, pivot).
    """
    a = [list(r) for r in rows if any(r)]
    if not a:
        return ()
    ncols = len(a[0])
    rank = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(rank, len(a)) if a[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][col]))
            a[rank], a[i0] = a[i0], a[rank]
            done = True
            for i in range(rank + 1, len(a)):
                if a[i][col]:
                    q = a[i][col] // a[rank][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[rank])]
                    if a[i][col]:
                        done = False
            if done:
                break
        if rank < len(a) and a[rank][col]:
            if a[rank][col] < 0:
                a[rank] = [-x for x in a[rank]]
            for i in range(rank):
                q = a[i][col] // a[rank][col]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[rank])]
            rank += 1
    return tuple(tuple(r) for r in a[:rank])


class IntegerSolver:
    """Reusable exact solver for m x = b over Z, with the SNF cached."""

    def __init__(self, m: IntMatrix):
        self.nrows = len(m)
        self.ncols = len(m[0]) if m else 0
        self.u, self.d, self.v = smith_normal_form(m)
        self.diag = tuple(
            self.d[i][i] for i in range(min(self.nrows, self.ncols))
        )
        self.rank = sum(1 for x in self.diag if x)

    def solve(self, b) -> IntVector | None:
        """One integer solution (free coordinates zero), or None."""
        ub = mat_vec(self.u, b)
        y = [0] * self.ncols
        for i in range(self.nrows):
            di = self.diag[i] if i < len(self.diag) else 0
            if di:
                if ub[i] % di:
                    return None
                y[i] = ub[i] // di
            elif ub[i]:
                return None
        return mat_vec(self.v, tuple(y))

    def kernel_basis(self) -> IntMatrix:
        """Basis of the saturated integer kernel {x : m x = 0} (as rows)."""
        cols = [tuple(self.v[i][j] for i in range(self.ncols))
                for j in range(self.rank, self.ncols)]
        return tuple(cols)


def right_kernel_basis(m: IntMatrix) -> IntMatrix:
    """Rows spanning the saturated lattice {x : m x = 0}."""
    return IntegerSolver(m).kernel_basis()


def left_kernel_basis(m: IntMatrix) -> IntMatrix:
    """Rows spanning the saturated lattice {w : w m = 0}."""
    return right_kernel_basis(transpose(m))


def solve_integer(m: IntMatrix, b) -> IntVector | None:
    return IntegerSolver(m).solve(b)


def affine_rank(points) -> int:
    """Dimension of the affine span of a set of rational points."""
    pts = list(points)
    if not pts:
        return -1
    base = pts[0]
    diffs = [vec_sub(p, base) for p in pts[1:]]
    if not diffs:
        return 0
    return mat_rank(diffs)


def independent_subset_indices(vectors, size: int):
    """Yield index tuples of linearly independent subsets of a given size."""
    for idx in combinations(range(len(vectors)), size):
        if mat_rank([vectors[i] for i in idx]) == size:
            yield idx
