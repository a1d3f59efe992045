"""Exact sparse realizations of the oscillator modes on a LevelBasis.

Matrix elements live in the rationals (complex rationals where the
position/momentum conversions introduce i); no square roots are ever
materialized.  Truncation semantics: a raising operator that would push a
state above the level cutoff maps it to zero, so algebraic identities are
only asserted on subspaces where that cannot happen.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._exact import IMAG_UNIT, conjugate_scalar
from .basis import level_of


def apply_raising(modes, n, mu, cutoff):
    """Prepend a raising mode; None if the result exceeds the cutoff."""
    if level_of(modes) + n > cutoff:
        return None
    return tuple(sorted(modes + ((n, mu),)))


def apply_lowering(modes, n, mu, sign):
    """Contract a lowering mode against the monomial.

    Returns (coefficient, new_modes) or None.  The coefficient is
    multiplicity * n * eta^{mu mu}, straight from the mode commutator.
    """
    key = (n, mu)
    count = modes.count(key)
    if not count:
        return None
    i = modes.index(key)
    return count * n * sign, modes[:i] + modes[i + 1:]


def alpha_apply(modes, n, mu, signs, cutoff):
    """Apply the mode operator with index n (n < 0 raises, n > 0 lowers)."""
    if n < 0:
        res = apply_raising(modes, -n, mu, cutoff)
        if res is None:
            return None
        return 1, res
    return apply_lowering(modes, n, mu, signs[mu])


class SparseOperator:
    """Column-sparse exact operator on a LevelBasis."""

    __slots__ = ("basis", "cols")

    def __init__(self, basis, cols=None):
        self.basis = basis
        self.cols = cols if cols is not None else [dict() for _ in range(basis.dim)]

    @classmethod
    def from_column_action(cls, basis, action, columns=None):
        """Build from a map modes -> {modes: coeff}; ``columns`` restricts domain."""
        op = cls(basis)
        index = basis.index
        cols = range(basis.dim) if columns is None else columns
        for j in cols:
            image = action(basis.states[j])
            if image:
                op.cols[j] = {index[m]: c for m, c in image.items() if c}
        return op

    @classmethod
    def identity(cls, basis, scale=1):
        op = cls(basis)
        for j in range(basis.dim):
            op.cols[j] = {j: scale}
        return op

    @property
    def dim(self):
        return self.basis.dim

    def column(self, j):
        return self.cols[j]

    def apply(self, vec):
        """Apply to a sparse vector {index: coeff}."""
        out = {}
        for j, x in vec.items():
            if not x:
                continue
            for i, v in self.cols[j].items():
                new = out.get(i, 0) + v * x
                if new:
                    out[i] = new
                else:
                    out.pop(i, None)
        return out

    def __matmul__(self, other):
        res = SparseOperator(self.basis)
        for j, col in enumerate(other.cols):
            if col:
                res.cols[j] = self.apply(col)
        return res

    def __add__(self, other):
        res = SparseOperator(self.basis)
        for j in range(self.dim):
            col = dict(self.cols[j])
            for i, v in other.cols[j].items():
                new = col.get(i, 0) + v
                if new:
                    col[i] = new
                else:
                    col.pop(i, None)
            res.cols[j] = col
        return res

    def __sub__(self, other):
        return self + (other * -1)

    def __mul__(self, scalar):
        res = SparseOperator(self.basis)
        if not scalar:
            return res
        for j in range(self.dim):
            res.cols[j] = {i: v * scalar for i, v in self.cols[j].items()}
        return res

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def transpose(self):
        res = SparseOperator(self.basis)
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                res.cols[i][j] = v
        return res

    def restrict_columns(self, max_level):
        """Drop columns whose state level exceeds ``max_level``."""
        res = SparseOperator(self.basis)
        levels = self.basis.levels
        for j, col in enumerate(self.cols):
            if col and levels[j] <= max_level:
                res.cols[j] = dict(col)
        return res

    def is_zero(self):
        return all(not col for col in self.cols)

    def nnz(self):
        return sum(len(col) for col in self.cols)

    def entries(self):
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                yield i, j, v

    def to_dense_block(self, rows, cols):
        rows = list(rows)
        cols = list(cols)
        rindex = {r: i for i, r in enumerate(rows)}
        out = [[Fraction(0)] * len(cols) for _ in rows]
        for cj, j in enumerate(cols):
            for i, v in self.cols[j].items():
                if i in rindex:
                    out[rindex[i]][cj] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseOperator):
            return NotImplemented
        return self.cols == other.cols

    def __repr__(self):
        return f"SparseOperator(dim={self.dim}, nnz={self.nnz()})"


def alpha(n, mu, basis, metric=None):
    """Mode operator on the truncated basis (n < 0 raises, n > 0 lowers).

    ``metric`` supplies the eta factors picked up by contractions; omitting
    it means a Euclidean internal metric (the light-cone case).
    """
    if n == 0:
        raise ValueError("mode number 0 is the center-of-mass momentum, not an oscillator")
    if abs(n) > basis.cutoff:
        raise ValueError(f"|n| = {abs(n)} exceeds the level cutoff {basis.cutoff}")
    if not 0 <= mu < basis.directions:
        raise ValueError(f"direction {mu} out of range [0, {basis.directions})")
    signs = metric.signs if metric is not None else (1,) * basis.directions
    op = SparseOperator(basis)
    index = basis.index
    for j, modes in enumerate(basis.states):
        res = alpha_apply(modes, n, mu, signs, basis.cutoff)
        if res is not None:
            coeff, image = res
            op.cols[j] = {index[image]: coeff}
    return op


def state_norm_factor(modes, signs):
    """Exact pairing of a monomial with itself.

    With a diagonal metric the monomial basis is orthogonal level by level
    and the diagonal entry is prod over distinct modes of mult! * (n * eta)^mult.
    """
    val = 1
    i = 0
    while i < len(modes):
        j = i
        while j < len(modes) and modes[j] == modes[i]:
            j += 1
        count = j - i
        n, mu = modes[i]
        base = n * signs[mu]
        for k in range(1, count + 1):
            val *= k * base
        i = j
    return val


def pair_states(s_modes, t_modes, signs):
    """Inner product of two basis monomials, by contracting lowerings through.

    Independent of :func:`state_norm_factor`; used to build the Gram and as
    a cross-check that the basis really is orthogonal.
    """
    vec = {t_modes: 1}
    for n, mu in s_modes:
        nxt = {}
        for modes, coeff in vec.items():
            res = apply_lowering(modes, n, mu, signs[mu])
            if res is None:
                continue
            c, rest = res
            nxt[rest] = nxt.get(rest, 0) + coeff * c
        vec = nxt
        if not vec:
            return 0
    return vec.get((), 0)


class IndefiniteGram:
    """Exact inner-product matrix on a LevelBasis, block diagonal by level.

    In the unnormalized monomial basis the blocks come out diagonal, so the
    matrix is stored as a diagonal plus the level bookkeeping; ``block``
    materializes a dense level block on demand.
    """

    def __init__(self, basis, metric):
        self.basis = basis
        self.metric = metric
        signs = metric.signs
        self.diagonal = [Fraction(pair_states(m, m, signs)) for m in basis.states]
        self._signature = None

    def entry(self, i, j):
        if i == j:
            return self.diagonal[i]
        return Fraction(0)

    def block(self, level):
        idx = list(self.basis.level_slice(level))
        n = len(idx)
        out = [[Fraction(0)] * n for _ in range(n)]
        for k, i in enumerate(idx):
            out[k][k] = self.diagonal[i]
        return out

    def diagonal_of_level(self, level):
        return [self.diagonal[i] for i in self.basis.level_slice(level)]

    def signature(self):
        """(n_plus, n_zero, n_minus) over the whole truncated space."""
        if self._signature is None:
            pos = sum(1 for v in self.diagonal if v > 0)
            neg = sum(1 for v in self.diagonal if v < 0)
            zero = len(self.diagonal) - pos - neg
            self._signature = (pos, zero, neg)
        return self._signature

    def block_signature(self, level):
        vals = self.diagonal_of_level(level)
        pos = sum(1 for v in vals if v > 0)
        neg = sum(1 for v in vals if v < 0)
        return pos, len(vals) - pos - neg, neg

    def inner(self, u, v, conjugate=True):
        """Pairing of sparse coefficient vectors; conjugates the first slot."""
        total = 0
        if len(u) > len(v):
            for i, x in v.items():
                y = u.get(i)
                if y is not None and self.diagonal[i]:
                    yy = conjugate_scalar(y) if conjugate else y
                    total = total + yy * self.diagonal[i] * x
            return total
        for i, x in u.items():
            y = v.get(i)
            if y is not None and self.diagonal[i]:
                xx = conjugate_scalar(x) if conjugate else x
                total = total + xx * self.diagonal[i] * y
        return total

    def is_positive_definite(self):
        return all(v > 0 for v in self.diagonal)


def gram(basis, metric):
    """Exact Gram matrix of the monomial basis for the given metric."""
    return IndefiniteGram(basis, metric)


@dataclass(frozen=True)
class ScaledOperator:
    """An operator of the form matrix * sqrt(scale2), with scale2 rational.

    Irrational normalizations (the 1/sqrt(n) in the ladder conversions) are
    carried formally so that downstream products collapse back to exact
    rational operators whenever the combined scale2 is a perfect square.
    """

    matrix: SparseOperator
    scale2: Fraction

    def times(self, other):
        return ScaledOperator(self.matrix @ other.matrix, self.scale2 * other.scale2)

    def plus(self, other):
        if self.scale2 != other.scale2:
            raise ValueError("can only add formal operators with equal scale2")
        return ScaledOperator(self.matrix + other.matrix, self.scale2)

    def commutator(self, other):
        scale2 = self.scale2 * other.scale2
        return ScaledOperator(self.matrix @ other.matrix - other.matrix @ self.matrix, scale2)

    def exact(self):
        """Collapse to an exact SparseOperator; requires scale2 a rational square
        (a zero matrix collapses regardless of the formal scale)."""
        if self.matrix.is_zero():
            return self.matrix
        num = self.scale2.numerator
        den = self.scale2.denominator
        rn = _exact_isqrt(num)
        rd = _exact_isqrt(den)
        if rn is None or rd is None:
            raise ValueError(f"scale2 = {self.scale2} is not a perfect rational square")
        return self.matrix * Fraction(rn, rd)


def _exact_isqrt(n):
    if n < 0:
        return None
    r = int(n ** 0.5)
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand * cand == n:
            return cand
    return None


def ladder_from_alpha(n, k, basis):
    """Light-cone ladder pair (a_n^k, a_n^k*) as formal scaled operators.

    a_n = i alpha_n / sqrt(n) and a_n* = -i alpha_{-n} / sqrt(n); the sqrt
    stays formal.  Products such as the number operator alpha_{-n} alpha_n / n
    collapse to exact rational matrices via :meth:`ScaledOperator.exact`.
    """
    if n < 1:
        raise ValueError("ladder mode number must be >= 1")
    if n > basis.cutoff:
        raise ValueError(f"mode {n} exceeds the level cutoff {basis.cutoff}")
    low = alpha(n, k, basis)
    high = alpha(-n, k, basis)
    a_op = ScaledOperator(low * IMAG_UNIT, Fraction(1, n))
    a_dag = ScaledOperator(high * (-IMAG_UNIT), Fraction(1, n))
    return a_op, a_dag


def position_operator(n, k, basis):
    """x_n^k = (2n)^(-1/2) (a* + a) as a formal scaled operator."""
    low = alpha(n, k, basis)
    high = alpha(-n, k, basis)
    return ScaledOperator((low - high) * IMAG_UNIT, Fraction(1, 2 * n * n))


def momentum_operator(n, k, basis):
    """p_n^k = i (n/2)^(1/2) (a* - a) as a formal scaled operator."""
    low = alpha(n, k, basis)
    high = alpha(-n, k, basis)
    return ScaledOperator(low + high, Fraction(1, 2))


def number_operator(n, k, basis):
    """n a_n* a_n = alpha_{-n} alpha_n, exact."""
    a_op, a_dag = ladder_from_alpha(n, k, basis)
    return a_dag.times(a_op).exact() * n


def commutator(op_a, op_b):
    return op_a @ op_b - op_b @ op_a


def ccr_residual_entries(m, n, mu, nu, basis, metric):
    """Entries of [alpha_m^mu, alpha_n^nu] - m delta_{m+n} eta^{mu nu} Id on the safe columns.

    Streams over safe-level basis states without materializing matrices;
    an empty result means the residual is the exact zero matrix.
    """
    signs = metric.signs
    cutoff = basis.cutoff
    safe = cutoff - abs(m) - abs(n)
    expected = 0
    if m + n == 0 and mu == nu:
        expected = m * signs[mu]
    bad = []
    if safe < 0:
        return bad
    top = basis.level_start[safe + 1]
    states = basis.states
    for j in range(top):
        s = states[j]
        out = {}
        first = alpha_apply(s, n, nu, signs, cutoff)
        if first is not None:
            c1, m1 = first
            second = alpha_apply(m1, m, mu, signs, cutoff)
            if second is not None:
                c2, m2 = second
                out[m2] = out.get(m2, 0) + c1 * c2
        first = alpha_apply(s, m, mu, signs, cutoff)
        if first is not None:
            c1, m1 = first
            second = alpha_apply(m1, n, nu, signs, cutoff)
            if second is not None:
                c2, m2 = second
                out[m2] = out.get(m2, 0) - c1 * c2
        if expected:
            out[s] = out.get(s, 0) - expected
        for modes, coeff in out.items():
            if coeff:
                bad.append((j, modes, coeff))
    return bad


def adjointness_residual(n, mu, basis, metric, max_pairs=None):
    """Exact check that the raising mode is the Gram adjoint of the lowering mode.

    Returns the first violating triple (i, j, lhs - rhs) or None.  Compares
    <alpha_{-n} u, v> with <u, alpha_n v> for basis states of matching level.
    """
    g = gram(basis, metric)
    raise_op = alpha(-n, mu, basis, metric)
    lower_op = alpha(n, mu, basis, metric)
    checked = 0
    for j in range(basis.dim):
        for i in range(basis.dim):
            if basis.levels[i] + n != basis.levels[j]:
                continue
            lhs = g.inner(raise_op.cols[i], {j: 1})
            rhs = g.inner({i: 1}, lower_op.cols[j])
            if lhs != rhs:
                return i, j, lhs - rhs
            checked += 1
            if max_pairs is not None and checked >= max_pairs:
                return None
    return None
