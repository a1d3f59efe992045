"""Constraint operators, the mass-squared operator, and the light-cone
Hamiltonian, all exact on a truncated LevelBasis.

The quadratic sums are Wick ordered (lowering part applied first), and for
a nonzero grading the two factors of each term commute, so no ordering
constant enters anywhere except the explicit intercept shift.  The bracket
residual harness carries the central coefficient c (m^3 - m) / 12 with
c = d; the coefficient is measured by the brute-force fit below, not
assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .basis import level_of
from .oscillators import SparseOperator, alpha_apply


def lorentz_square(p):
    """eta_{mu nu} p^mu p^nu with eta = diag(-1, +1, ..., +1)."""
    total = -p[0] * p[0]
    for x in p[1:]:
        total += x * x
    return total


def lower_index(p):
    return (-p[0],) + tuple(p[1:])


@dataclass(frozen=True)
class OnShellMomentum:
    """A mass level r together with an exact rational momentum with p^2 + r = 0."""

    r: Fraction
    p: tuple

    def __post_init__(self):
        psq = lorentz_square(self.p)
        if psq + self.r != 0:
            raise ValueError(f"momentum {self.p} is off shell for r = {self.r}: p^2 = {psq}")
        if self.r >= 0 and self.p[0] <= 0:
            raise ValueError("positive-shell momentum needs p^0 > 0 for r >= 0")

    @property
    def dimension(self):
        return len(self.p)


def standard_onshell_momentum(level, d, a=Fraction(1)):
    """A convenient exact rational point on the shell p^2 = 2a - 2 level.

    Solves p0^2 - p1^2 = 2 level - 2a + 1 with a third component of 1; needs
    d >= 3.  For the spacelike shells (r < 0) the split parameter is raised
    until p^0 > 0.
    """
    if d < 3:
        raise ValueError("standard momentum family needs d >= 3")
    a = Fraction(a)
    s = 2 * level - 2 * a + 1
    t = 1
    while Fraction(s, t) + t <= 0:
        t += 1
    p0 = Fraction(Fraction(s, t) + t, 2)
    p1 = Fraction(Fraction(s, t) - t, 2)
    p = (p0, p1, Fraction(1)) + (Fraction(0),) * (d - 3)
    return OnShellMomentum(r=2 * level - 2 * a, p=p)


@dataclass(frozen=True)
class LightConeMomentum:
    p_plus: Fraction
    p_tilde: tuple

    def __post_init__(self):
        if self.p_plus <= 0:
            raise ValueError(f"p_plus must be positive, got {self.p_plus}")

    def tilde_square(self):
        return sum(x * x for x in self.p_tilde)


def apply_constraint_operator(m, p, modes, cutoff, signs):
    """Image of a basis monomial under the grading-m constraint operator.

    For m = 0 this is p^2/2 plus the level number; otherwise the linear
    momentum term plus the half-weighted quadratic sum over mode pairs
    (j, k) with j + k = m, each unordered pair counted once and the
    diagonal pair j = k at weight 1/2.
    """
    if m == 0:
        c = Fraction(lorentz_square(p), 2) + level_of(modes)
        return {modes: c} if c else {}
    out = {}
    p_low = lower_index(p)
    dirs = len(signs)

    def add(mm, c):
        if not c:
            return
        new = out.get(mm, 0) + c
        if new:
            out[mm] = new
        else:
            del out[mm]

    for mu in range(dirs):
        pm = p_low[mu]
        if not pm:
            continue
        res = alpha_apply(modes, m, mu, signs, cutoff)
        if res is not None:
            add(res[1], pm * res[0])

    pairs = []
    if m >= 2:
        for j in range(1, m // 2 + 1):
            pairs.append((j, m - j))
    if m <= -2:
        for j in range(m + 1, m // 2 + 1):
            pairs.append((j, m - j))
    hi = min(cutoff, cutoff + m)
    for k in range(max(0, m) + 1, hi + 1):
        pairs.append((m - k, k))

    for j, k in pairs:
        weight = Fraction(1, 2) if j == k else 1
        for mu in range(dirs):
            eta = signs[mu]
            first = alpha_apply(modes, k, mu, signs, cutoff)
            if first is None:
                continue
            c1, m1 = first
            second = alpha_apply(m1, j, mu, signs, cutoff)
            if second is None:
                continue
            c2, m2 = second
            add(m2, weight * eta * c1 * c2)
    return out


def apply_constraint_to_vector(m, p, vec, cutoff, signs):
    out = {}
    for modes, coeff in vec.items():
        if not coeff:
            continue
        for mm, c in apply_constraint_operator(m, p, modes, cutoff, signs).items():
            new = out.get(mm, 0) + coeff * c
            if new:
                out[mm] = new
            else:
                del out[mm]
    return out


def build_L0(momentum, basis, metric):
    """Diagonal operator p^2/2 + level on the covariant basis."""
    signs = metric.signs
    p = momentum.p
    return SparseOperator.from_column_action(
        basis, lambda modes: apply_constraint_operator(0, p, modes, basis.cutoff, signs))


def build_Lm(m, momentum, basis, metric):
    """Constraint operator of level grading -m (both signs of m allowed)."""
    if m == 0:
        return build_L0(momentum, basis, metric)
    if abs(m) > basis.cutoff:
        raise ValueError(f"|m| = {abs(m)} exceeds the cutoff {basis.cutoff}")
    signs = metric.signs
    p = momentum.p
    return SparseOperator.from_column_action(
        basis, lambda modes: apply_constraint_operator(m, p, modes, basis.cutoff, signs))


def build_M2(basis, a):
    """Mass-squared operator: diagonal with eigenvalue 2 level - 2a.

    The same formula covers both gauges; only the direction count of the
    underlying basis differs.
    """
    a = Fraction(a)
    op = SparseOperator(basis)
    for j in range(basis.dim):
        val = 2 * basis.levels[j] - 2 * a
        if val:
            op.cols[j] = {j: val}
    return op


def build_p_minus(pm, basis, a):
    """Light-cone Hamiltonian (p_tilde^2 + M^2) / (2 p^+), exact and diagonal."""
    a = Fraction(a)
    ptsq = pm.tilde_square()
    op = SparseOperator(basis)
    for j in range(basis.dim):
        val = Fraction(ptsq + 2 * basis.levels[j] - 2 * a, 2 * pm.p_plus)
        if val:
            op.cols[j] = {j: val}
    return op


def central_term(d, m):
    return Fraction(d, 12) * (m ** 3 - m)


def virasoro_bracket_residual(m, n, momentum, basis, metric):
    """[L_m, L_n] - (m - n) L_{m+n} - (d/12)(m^3 - m) delta_{m+n} on the safe columns.

    Returned as a SparseOperator supported on columns of level at most
    N - |m| - |n|; the contract is that it is exactly zero there.
    """
    signs = metric.signs
    cutoff = basis.cutoff
    p = momentum.p
    safe = cutoff - abs(m) - abs(n)
    op = SparseOperator(basis)
    if safe < 0:
        return op
    d = len(signs)
    central = central_term(d, m) if m + n == 0 else 0
    index = basis.index
    top = basis.level_start[safe + 1]
    for j in range(top):
        s = basis.states[j]
        col = {s: 1}
        lm_ln = apply_constraint_to_vector(m, p, apply_constraint_operator(n, p, s, cutoff, signs),
                                           cutoff, signs)
        ln_lm = apply_constraint_to_vector(n, p, apply_constraint_operator(m, p, s, cutoff, signs),
                                           cutoff, signs)
        out = dict(lm_ln)
        for mm, c in ln_lm.items():
            new = out.get(mm, 0) - c
            if new:
                out[mm] = new
            else:
                out.pop(mm, None)
        for mm, c in apply_constraint_operator(m + n, p, s, cutoff, signs).items():
            new = out.get(mm, 0) - (m - n) * c
            if new:
                out[mm] = new
            else:
                out.pop(mm, None)
        if m == -n and central:
            new = out.get(s, 0) - central
            if new:
                out[s] = new
            else:
                out.pop(s, None)
        if out:
            op.cols[j] = {index[mm]: c for mm, c in out.items()}
    return op


def fit_central_coefficient(momentum, basis, metric, modes=(1, 2, 3)):
    """Measure the central coefficient from vacuum expectations, exactly.

    For each m computes the scalar <Omega, ([L_m, L_{-m}] - 2m L_0) Omega>
    (requires 2m <= cutoff for a truncation-safe vacuum) and solves
    value = c (m^3 - m) / 12 for c, demanding consistency across the fitted
    mode numbers.  Returns (c, {m: value}).
    """
    signs = metric.signs
    cutoff = basis.cutoff
    p = momentum.p
    vacuum = ()
    values = {}
    c_fit = None
    for m in modes:
        if 2 * m > cutoff:
            raise ValueError(f"cutoff {cutoff} too small to fit mode {m}")
        down = apply_constraint_operator(-m, p, vacuum, cutoff, signs)
        up_down = apply_constraint_to_vector(m, p, down, cutoff, signs)
        # L_{-m} L_m Omega = 0 since L_m Omega = 0 for m > 0 with the linear
        # term killed by the vacuum; keep the subtraction anyway.
        up = apply_constraint_operator(m, p, vacuum, cutoff, signs)
        down_up = apply_constraint_to_vector(-m, p, up, cutoff, signs)
        l0 = apply_constraint_operator(0, p, vacuum, cutoff, signs)
        val = up_down.get(vacuum, 0) - down_up.get(vacuum, 0) - 2 * m * l0.get(vacuum, 0)
        values[m] = val
        if m == 1:
            if val != 0:
                raise ArithmeticError(f"m = 1 bracket defect {val}, expected 0")
            continue
        cand = Fraction(12 * val, m ** 3 - m)
        if c_fit is None:
            c_fit = cand
        elif c_fit != cand:
            raise ArithmeticError(
                f"central coefficient fit inconsistent: {c_fit} vs {cand} at m = {m}")
    return c_fit, values


def hermiticity_residual(m, momentum, basis, metric, gram_matrix):
    """First violation of <L_{-m} u, v> = <u, L_m v> over safe basis pairs, or None.

    Rows u are restricted to levels where L_{-m} cannot truncate
    (level(u) + |m| <= cutoff when m > 0).
    """
    signs = metric.signs
    cutoff = basis.cutoff
    p = momentum.p
    index = basis.index
    lift = abs(m)
    for i in range(basis.dim):
        if basis.levels[i] + lift > cutoff:
            continue
        left = apply_constraint_operator(-m, p, basis.states[i], cutoff, signs)
        left_vec = {index[mm]: c for mm, c in left.items()}
        for j in range(basis.dim):
            if basis.levels[j] != basis.levels[i] + m:
                continue
            right = apply_constraint_operator(m, p, basis.states[j], cutoff, signs)
            right_vec = {index[mm]: c for mm, c in right.items()}
            lhs = gram_matrix.inner(left_vec, {j: 1})
            rhs = gram_matrix.inner({i: 1}, right_vec)
            if lhs != rhs:
                return i, j, lhs - rhs
    return None


def mass_spectrum(cutoff, colors, a):
    """Rows (level, mass_squared, degeneracy) for levels up to the cutoff."""
    from .basis import level_degeneracy
    a = Fraction(a)
    return [(level, 2 * level - 2 * a, level_degeneracy(level, colors))
            for level in range(cutoff + 1)]
