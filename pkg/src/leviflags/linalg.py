"""Dense exact linear algebra over the rationals.

Everything downstream that needs a matrix fact checked against an honest
recomputation (the truncation oracle in particular) goes through here, so this
module stays dumb on purpose: lists of Fractions, textbook Gauss-Jordan with
first-nonzero pivoting, no cleverness.
"""

from fractions import Fraction

Scalar = Fraction


class Matrix:
    def __init__(self, rows):
        self.rows = [[Fraction(x) for x in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for row in self.rows:
            if len(row) != self.ncols:
                raise ValueError("ragged rows")

    @staticmethod
    def zero(nrows, ncols):
        return Matrix([[0] * ncols for _ in range(nrows)])

    def copy(self):
        return Matrix([row[:] for row in self.rows])

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __repr__(self):
        return "Matrix(%r)" % (self.rows,)


def rref(m):
    """Reduced row echelon form.  Returns (rank, echelon Matrix).

    Pivot search takes the first row with a nonzero entry in the current
    column (exact arithmetic, so no magnitude pivoting is wanted).
    """
    a = [row[:] for row in m.rows]
    nrows, ncols = len(a), (len(a[0]) if a else 0)
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if a[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return r, Matrix(a)


def pivot_columns(m):
    rank, e = rref(m)
    cols = []
    for i in range(rank):
        for c in range(e.ncols):
            if e.rows[i][c] != 0:
                cols.append(c)
                break
    return cols


def kernel(m):
    """Basis of the right null space, one vector per free column."""
    rank, e = rref(m)
    piv = []
    for i in range(rank):
        for c in range(e.ncols):
            if e.rows[i][c] != 0:
                piv.append(c)
                break
    free = [c for c in range(m.ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -e.rows[i][f]
        basis.append(v)
    return basis


def solve(m, b):
    """One solution x of m x = b, or None if the system is inconsistent."""
    aug = Matrix([row + [bi] for row, bi in zip(m.rows, b)])
    rank, e = rref(aug)
    x = [Fraction(0)] * m.ncols
    for i in range(rank):
        pc = None
        for c in range(e.ncols):
            if e.rows[i][c] != 0:
                pc = c
                break
        if pc == m.ncols:
            return None
        x[pc] = e.rows[i][m.ncols]
    return x


def rank(m):
    return rref(m)[0]


def row_space_contains(m, v):
    """Is v in the row span of m?"""
    rank_m, _ = rref(m)
    rank_ext, _ = rref(Matrix(m.rows + [list(v)]))
    return rank_m == rank_ext


def same_row_space(a, b):
    ra, _ = rref(a)
    rb, _ = rref(b)
    rj, _ = rref(Matrix(a.rows + b.rows))
    return ra == rb == rj
