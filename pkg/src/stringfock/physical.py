"""Constraint solving per mass level: the constrained subspace, its radical,
and the quotient signature.

Everything here is exact rational linear algebra; ghost versus no-ghost is
a sign question and gets no tolerance.  Only the constraints with positive
grading up to the level are imposed, since higher gradings annihilate the
level slice identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import config as cfg
from ._exact import (dense_to_sparse_rows, restrict_quadratic_form,
                     signature_symmetric, sparse_nullspace)
from .basis import enumerate_basis, level_degeneracy
from .oscillators import gram
from .virasoro import (OnShellMomentum, apply_constraint_operator,
                       standard_onshell_momentum)


@dataclass
class ConstraintSolution:
    """Exact solution of the constraints at one mass level.

    Coefficient vectors are sparse dicts over the level slice (local column
    index -> Fraction); ``gram_diagonal`` carries the slice's diagonal
    weights so pairings can be recomputed without the full basis.
    """

    r: Fraction
    p: tuple
    level: int
    basis_of_Hprime: list
    gram_on_Hprime: list
    radical_basis: list
    signature_on_Hprime: tuple
    quotient_signature: tuple
    gram_diagonal: dict

    @property
    def dim_Hprime(self):
        return len(self.basis_of_Hprime)

    @property
    def dim_radical(self):
        return len(self.radical_basis)

    @property
    def dim_phys(self):
        return self.dim_Hprime - self.dim_radical

    def slice_inner(self, u, v):
        total = Fraction(0)
        for c, x in u.items():
            y = v.get(c)
            if y is not None:
                w = self.gram_diagonal.get(c)
                if w:
                    total += x * w * y
        return total


def _level_from_mass(r, a, cutoff):
    r = Fraction(r)
    a = Fraction(a)
    twice_level = r + 2 * a
    if twice_level.denominator != 1 or twice_level < 0 or twice_level % 2 != 0:
        raise ValueError(f"mass level r = {r} is not in the spectrum for a = {a}")
    level = int(twice_level // 2)
    if level > cutoff:
        raise ValueError(f"level {level} exceeds the cutoff {cutoff}")
    return level


def solve_constraints(r, momentum, model, basis=None):
    """Solve the constraints at mass level r for the given on-shell momentum.

    Returns a :class:`ConstraintSolution` carrying the constrained-subspace
    basis (coefficient vectors over the level slice), the induced Gram, the
    radical, and the exact quotient signature.
    """
    model = cfg.validate(model)
    if model.gauge is not cfg.Gauge.COVARIANT:
        raise ValueError("constraint solving lives in the covariant gauge")
    level = _level_from_mass(r, model.a, model.level_cutoff)
    if isinstance(momentum, OnShellMomentum):
        mom = momentum
    else:
        mom = OnShellMomentum(r=Fraction(r), p=tuple(Fraction(x) for x in momentum))
    if mom.r != Fraction(r):
        raise ValueError(f"momentum carries r = {mom.r}, expected {r}")
    if len(mom.p) != model.d:
        raise ValueError(f"momentum has {len(mom.p)} components, expected d = {model.d}")
    if Fraction(r) == 0 and all(x == 0 for x in mom.p):
        raise ValueError("r = 0 needs a nonzero null momentum")
    if basis is None:
        basis = enumerate_basis(model.d, model.level_cutoff)
    metric = model.metric()
    signs = metric.signs

    slice_idx = list(basis.level_slice(level))
    offset = basis.level_start[level]
    rows = []
    for m in range(1, level + 1):
        row_map = {}
        for c, g_idx in enumerate(slice_idx):
            image = apply_constraint_operator(m, mom.p, basis.states[g_idx],
                                              basis.cutoff, signs)
            for mm, coeff in image.items():
                i = basis.index[mm]
                row_map.setdefault(i, {})[c] = Fraction(coeff)
        rows.extend(row_map[i] for i in sorted(row_map))
    kernel = sparse_nullspace(rows, len(slice_idx))

    g = gram(basis, metric)
    diag = {c: g.diagonal[offset + c] for c in range(len(slice_idx))}
    gram_prime = restrict_quadratic_form(diag, kernel)
    radical_local = sparse_nullspace(dense_to_sparse_rows(gram_prime), len(kernel))
    radical = []
    for w in radical_local:
        vec = {}
        for k, x in w.items():
            for c, y in kernel[k].items():
                new = vec.get(c, Fraction(0)) + x * y
                if new:
                    vec[c] = new
                else:
                    vec.pop(c, None)
        radical.append(vec)
    npos, nzero, nneg = signature_symmetric(gram_prime)
    assert nzero == len(radical)
    return ConstraintSolution(
        r=Fraction(r),
        p=mom.p,
        level=level,
        basis_of_Hprime=kernel,
        gram_on_Hprime=gram_prime,
        radical_basis=radical,
        signature_on_Hprime=(npos, nzero, nneg),
        quotient_signature=(npos, 0, nneg),
        gram_diagonal=diag,
    )


def ghost_probe(r, momentum, d, a, cutoff=None):
    """Quotient signature at mass level r for arbitrary (d, a)."""
    a = Fraction(a)
    level = int((Fraction(r) + 2 * a) / 2)
    model = cfg.ModelConfig(d=d, a=a, gauge=cfg.Gauge.COVARIANT,
                            level_cutoff=cutoff if cutoff is not None else max(level, 0))
    sol = solve_constraints(r, momentum, model)
    return sol.quotient_signature


def noghost_report(d, a, max_level, momenta=None):
    """Per-level constraint report with the light-cone degeneracy comparison.

    Each row records dim H', the radical dimension, the physical dimension,
    the quotient signature, and whether the quotient is positive definite
    with the transverse (d - 2 color) degeneracy.
    """
    a = Fraction(a)
    model = cfg.validate(cfg.ModelConfig(d=d, a=a, gauge=cfg.Gauge.COVARIANT,
                                         level_cutoff=max_level))
    basis = enumerate_basis(d, max_level)
    rows = []
    for level in range(max_level + 1):
        r = 2 * level - 2 * a
        if momenta and level in momenta:
            mom = momenta[level]
        else:
            mom = standard_onshell_momentum(level, d, a)
        sol = solve_constraints(r, mom, model, basis=basis)
        lc_deg = level_degeneracy(level, d - 2) if d > 2 else None
        npos, nzero, nneg = sol.quotient_signature
        rows.append({
            "level": level,
            "r": r,
            "dim_Hprime": sol.dim_Hprime,
            "dim_radical": sol.dim_radical,
            "dim_phys": sol.dim_phys,
            "signature": (npos, nzero, nneg),
            "lightcone_degeneracy": lc_deg,
            "match": bool(nneg == 0 and nzero == 0 and lc_deg == sol.dim_phys),
        })
    return rows


def radical_orthogonality_defect(solution):
    """Max |<radical vector, H' vector>| over all pairs; exact zero expected."""
    worst = Fraction(0)
    for w in solution.radical_basis:
        for v in solution.basis_of_Hprime:
            val = abs(solution.slice_inner(w, v))
            if val > worst:
                worst = val
    return worst
