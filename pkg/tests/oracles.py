"""Independent oracles used to freeze expected values.

Each oracle deliberately recomputes its quantity along a different route
from the implementation under test: partition counts by direct recursive
enumeration, inner products by perfect-matching combinatorics, constraint
operators by explicit sparse matrix composition, and the massless smear by
quadrature of the closed-form kernel.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import numpy as np

from stringfock.oscillators import SparseOperator, alpha
from stringfock.virasoro import lower_index


def brute_colored_partition_states(level, colors):
    """All level-``level`` monomials by direct recursion over mode slots."""
    out = set()

    def rec(remaining, max_mode, acc):
        if remaining == 0:
            out.add(tuple(sorted(acc)))
            return
        for n in range(1, min(remaining, max_mode) + 1):
            for c in range(colors):
                rec(remaining - n, n, acc + [(n, c)])

    rec(level, level, [])
    return out


def brute_count(level, colors):
    return len(brute_colored_partition_states(level, colors))


def matching_inner(s_modes, t_modes, signs):
    """<s, t> as a sum over perfect matchings of equal-mode-number pairs.

    Each matched pair (n, mu) <-> (n, nu) contributes n * eta^{mu nu}, which
    for a diagonal metric means zero unless mu == nu.
    """
    if len(s_modes) != len(t_modes):
        return 0
    if sorted(n for n, _ in s_modes) != sorted(n for n, _ in t_modes):
        return 0
    total = 0
    for perm in permutations(range(len(t_modes))):
        term = 1
        for i, j in enumerate(perm):
            n_s, mu = s_modes[i]
            n_t, nu = t_modes[j]
            if n_s != n_t or mu != nu:
                term = 0
                break
            term *= n_s * signs[mu]
        total += term
    return total


def bruteforce_constraint_matrix(m, momentum, basis, metric):
    """Constraint operator assembled from explicit mode-matrix products.

    Independent of the per-column application route: the linear term is a
    momentum-weighted sum of single mode matrices and the quadratic term a
    half-weighted normal-ordered sum of matrix products.
    """
    signs = metric.signs
    n_cut = basis.cutoff
    p_low = lower_index(momentum.p)
    total = SparseOperator(basis)
    cache = {}

    def mode(idx, mu):
        key = (idx, mu)
        if key not in cache:
            cache[key] = alpha(idx, mu, basis, metric)
        return cache[key]

    for mu in range(basis.directions):
        if p_low[mu]:
            total = total + mode(m, mu) * Fraction(p_low[mu])
    for n in range(-n_cut, n_cut + 1):
        j = m - n
        if n in (0, m) or abs(j) > n_cut or abs(n) > n_cut:
            continue
        for mu in range(basis.directions):
            if j > 0 and n < 0:
                prod = mode(n, mu) @ mode(j, mu)   # creator to the left
            else:
                prod = mode(j, mu) @ mode(n, mu)
            total = total + prod * Fraction(signs[mu], 2)
    return total


def massless_smear(f_bump, g_bump, n_g=801, n_f=301):
    """integral f (E g) for the 1+1 massless kernel, from the closed form.

    The kernel is +1/2 sgn(t) inside the cone; the inner integral over the
    cone cross-section uses prefix sums, the rest is nested quadrature.
    """
    gs = np.linspace(g_bump.time.lo, g_bump.time.hi, n_g)
    gy = np.linspace(g_bump.space[0].lo, g_bump.space[0].hi, n_g)
    gv = g_bump.time(gs)[:, None] * g_bump.space[0](gy)[None, :]
    dy = gy[1] - gy[0]
    ds = gs[1] - gs[0]
    prefix = np.concatenate(
        [np.zeros((n_g, 1)), np.cumsum((gv[:, :-1] + gv[:, 1:]) * 0.5 * dy, axis=1)],
        axis=1)

    def cum(i, yq):
        return np.interp(yq, gy, prefix[i], left=0.0, right=prefix[i, -1])

    ft = np.linspace(f_bump.time.lo, f_bump.time.hi, n_f)
    fx = np.linspace(f_bump.space[0].lo, f_bump.space[0].hi, n_f)
    fv = f_bump.time(ft)[:, None] * f_bump.space[0](fx)[None, :]
    dft = ft[1] - ft[0]
    dfx = fx[1] - fx[0]
    total = 0.0
    for a, t in enumerate(ft):
        conv = np.zeros(len(fx))
        for i, s in enumerate(gs):
            rad = t - s
            if rad > 0:
                conv += 0.5 * (cum(i, fx + rad) - cum(i, fx - rad)) * ds
            elif rad < 0:
                conv -= 0.5 * (cum(i, fx - rad) - cum(i, fx + rad)) * ds
        total += float(np.sum(fv[a] * conv)) * dfx * dft
    return total
