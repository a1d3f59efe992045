"""Exact rational scalars and the small linear-algebra kernel used by the
oscillator and constraint layers.

No floats enter this module.  Matrices are desk scale, so the algorithms
favor determinism over asymptotics: elimination scans columns left to right
and always picks the first usable pivot row.
"""

from __future__ import annotations

from fractions import Fraction


class ComplexRational:
    """Complex scalar with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def _coerce(self, other):
        if isinstance(other, ComplexRational):
            return other
        if isinstance(other, (int, Fraction)):
            return ComplexRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ComplexRational(self.re * o.re - self.im * o.im,
                               self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return ComplexRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ComplexRational({self.re!r}, {self.im!r})"


IMAG_UNIT = ComplexRational(0, 1)


def conjugate_scalar(x):
    """Complex conjugate for any exact scalar (int, Fraction, ComplexRational)."""
    if isinstance(x, ComplexRational):
        return x.conjugate()
    return x


def scalar_to_complex(x):
    if isinstance(x, ComplexRational):
        return complex(x)
    return complex(float(x), 0.0)


def signature_symmetric(matrix):
    """Inertia (n_plus, n_zero, n_minus) of a symmetric rational matrix.

    Uses congruence transformations (symmetric Gaussian elimination); when
    the remaining diagonal vanishes but the block does not, a row/column
    addition manufactures a nonzero pivot (valid away from characteristic 2).
    Exact, hence suitable for sign questions with no tolerance.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    pos = neg = zero = 0
    k = 0
    while k < n:
        piv = None
        for i in range(k, n):
            if a[i][i]:
                piv = i
                break
        if piv is None:
            hit = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if a[i][j]:
                        hit = (i, j)
                        break
                if hit:
                    break
            if hit is None:
                zero += n - k
                break
            i, j = hit
            # congruence: row_i += row_j, col_i += col_j gives a[i][i] = 2 a[i][j]
            for c in range(n):
                a[i][c] += a[j][c]
            for r in range(n):
                a[r][i] += a[r][j]
            continue
        if piv != k:
            a[piv], a[k] = a[k], a[piv]
            for r in range(n):
                a[r][piv], a[r][k] = a[r][k], a[r][piv]
        d = a[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / d
            if f:
                ai, ak = a[i], a[k]
                for j in range(k + 1, n):
                    if ak[j]:
                        ai[j] -= f * ak[j]
        for i in range(k + 1, n):
            a[i][k] = Fraction(0)
            a[k][i] = Fraction(0)
        k += 1
    return pos, zero, neg


def sparse_rref(rows, ncols):
    """Reduced row echelon form of a sparse rational matrix.

    ``rows`` is a list of {col: Fraction} dicts; returns (pivot_rows,
    pivot_cols) where pivot_rows[i] is the normalized row whose leading
    column is pivot_cols[i].  Deterministic: columns are processed in
    ascending order, candidate rows by list position.
    """
    work = [dict(r) for r in rows if r]
    pivot_rows = []
    pivot_cols = []
    for col in range(ncols):
        pick = None
        for idx, row in enumerate(work):
            if col in row:
                pick = idx
                break
        if pick is None:
            continue
        row = work.pop(pick)
        inv = 1 / row[col]
        row = {c: v * inv for c, v in row.items()}
        for other in work:
            f = other.get(col)
            if f:
                for c, v in row.items():
                    new = other.get(c, Fraction(0)) - f * v
                    if new:
                        other[c] = new
                    else:
                        other.pop(c, None)
        for prev in pivot_rows:
            f = prev.get(col)
            if f:
                for c, v in row.items():
                    new = prev.get(c, Fraction(0)) - f * v
                    if new:
                        prev[c] = new
                    else:
                        prev.pop(c, None)
        work = [r for r in work if r]
        pivot_rows.append(row)
        pivot_cols.append(col)
    return pivot_rows, pivot_cols


def sparse_nullspace(rows, ncols):
    """Basis of the right kernel of a sparse rational matrix.

    Returns a list of {col: Fraction} vectors, one per free column, in
    ascending free-column order (the free column carries coefficient 1).
    """
    pivot_rows, pivot_cols = sparse_rref(rows, ncols)
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = {free: Fraction(1)}
        for prow, pcol in zip(pivot_rows, pivot_cols):
            coeff = prow.get(free)
            if coeff:
                vec[pcol] = -coeff
        basis.append(vec)
    return basis


def sparse_dot(u, v):
    """Dot product of two sparse vectors (no conjugation)."""
    if len(u) > len(v):
        u, v = v, u
    total = Fraction(0)
    for k, x in u.items():
        y = v.get(k)
        if y is not None:
            total += x * y
    return total


def restrict_quadratic_form(diag, vectors):
    """Matrix of a diagonal quadratic form on the span of sparse vectors.

    ``diag`` maps index -> Fraction weight; returns the dense symmetric
    matrix M[i][j] = sum_k v_i[k] * diag[k] * v_j[k].
    """
    m = len(vectors)
    weighted = []
    for v in vectors:
        weighted.append({k: diag[k] * x for k, x in v.items() if diag[k]})
    out = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        wi = weighted[i]
        for j in range(i, m):
            val = sparse_dot(wi, vectors[j])
            out[i][j] = val
            out[j][i] = val
    return out


def dense_to_sparse_rows(matrix):
    return [{j: Fraction(x) for j, x in enumerate(row) if x} for row in matrix]
