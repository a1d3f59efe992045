from fractions import Fraction

import pytest

from stringfock.basis import enumerate_basis
from stringfock.config import minkowski_metric
from stringfock.oscillators import alpha, gram
from stringfock.virasoro import (LightConeMomentum, OnShellMomentum, build_L0,
                                 build_Lm, build_M2, build_p_minus, central_term,
                                 fit_central_coefficient, hermiticity_residual,
                                 lorentz_square, mass_spectrum,
                                 standard_onshell_momentum,
                                 virasoro_bracket_residual)

from oracles import bruteforce_constraint_matrix


def tachyon_momentum(d):
    p = (Fraction(1), Fraction(1), Fraction(1), Fraction(1)) + (Fraction(0),) * (d - 4)
    return OnShellMomentum(r=Fraction(-2), p=p)


def null_momentum(d):
    p = (Fraction(1), Fraction(1)) + (Fraction(0),) * (d - 2)
    return OnShellMomentum(r=Fraction(0), p=p)


def test_onshell_validation():
    with pytest.raises(ValueError):
        OnShellMomentum(r=Fraction(0), p=(Fraction(1), Fraction(2)))
    with pytest.raises(ValueError):
        # r >= 0 needs p^0 > 0
        OnShellMomentum(r=Fraction(0), p=(Fraction(-1), Fraction(1)))
    mom = standard_onshell_momentum(2, 26)
    assert lorentz_square(mom.p) + mom.r == 0


def test_L0_on_vacuum_hits_tachyon_shell(small_cov_basis, small_cov_metric):
    mom = tachyon_momentum(4)
    op = build_L0(mom, small_cov_basis, small_cov_metric)
    vac = small_cov_basis.index[()]
    assert op.cols[vac] == {vac: Fraction(1)}   # p^2/2 = 1, so L0 - a kills it at a = 1


def test_L0_oscillator_part_is_level(small_cov_basis, small_cov_metric):
    mom = null_momentum(4)
    op = build_L0(mom, small_cov_basis, small_cov_metric)
    for j in small_cov_basis.level_slice(2):
        assert op.cols[j] == {j: Fraction(2)}   # p^2 = 0, eigenvalue = level


def test_L1_photon_condition(cov26_basis_n2, cov26_metric):
    # the level-one state with coefficients c_mu is annihilated exactly when
    # sum_mu p^mu c_mu = 0 (the paper's lower-index polarization condition)
    basis, metric = cov26_basis_n2, cov26_metric
    mom = null_momentum(26)
    l1 = build_Lm(1, mom, basis, metric)
    vac = basis.index[()]
    transverse = basis.index[((1, 2),)]
    assert l1.cols[transverse] == {}
    spatial = basis.index[((1, 1),)]
    assert l1.cols[spatial] == {vac: Fraction(1)}
    timelike = basis.index[((1, 0),)]
    assert l1.cols[timelike] == {vac: Fraction(1)}
    # the longitudinal combination (coefficients -1, +1 at p = (1,1,0,...))
    # is annihilated: p^0 (-1) + p^1 (+1) = 0
    vec = l1.apply({timelike: Fraction(-1), spatial: Fraction(1)})
    assert vec == {}


def test_Lm_annihilates_vacuum(small_cov_basis, small_cov_metric):
    mom = tachyon_momentum(4)
    vac = small_cov_basis.index[()]
    for m in (1, 2, 3):
        op = build_Lm(m, mom, small_cov_basis, small_cov_metric)
        assert op.cols[vac] == {}


def test_Lm_matches_bruteforce_matrix_composition(small_cov_basis, small_cov_metric):
    mom = standard_onshell_momentum(2, 4)
    for m in (-2, -1, 1, 2):
        direct = build_Lm(m, mom, small_cov_basis, small_cov_metric)
        brute = bruteforce_constraint_matrix(m, mom, small_cov_basis, small_cov_metric)
        # brute-force products truncate harder near the cutoff; compare on
        # columns where no intermediate state can overflow
        safe = small_cov_basis.cutoff - max(abs(m), 2) - 1
        for j in range(small_cov_basis.level_start[safe + 1]):
            assert direct.cols[j] == brute.cols[j], (m, j)


def test_bracket_residual_examples(small_cov_basis, small_cov_metric):
    mom = standard_onshell_momentum(1, 4)
    assert virasoro_bracket_residual(1, -1, mom, small_cov_basis, small_cov_metric).is_zero()
    assert virasoro_bracket_residual(1, 2, mom, small_cov_basis, small_cov_metric).is_zero()
    for k in (1, 2, 3):
        assert virasoro_bracket_residual(0, k, mom, small_cov_basis,
                                         small_cov_metric).is_zero()
        assert virasoro_bracket_residual(0, -k, mom, small_cov_basis,
                                         small_cov_metric).is_zero()


def test_central_term_measured_then_frozen():
    # the bracket defect [L_m, L_-m] - 2m L_0 on the vacuum, fitted once by
    # brute force and frozen as c (m^3 - m)/12 with c = d
    for d in (4, 26):
        basis = enumerate_basis(d, 4)
        metric = minkowski_metric(d)
        mom = standard_onshell_momentum(1, d)
        c_fit, values = fit_central_coefficient(mom, basis, metric, modes=(1, 2))
        assert c_fit == d
        assert values[1] == 0
        assert values[2] == central_term(d, 2) == Fraction(d, 2)


def test_central_coefficient_from_independent_matrix_route(small_cov_basis,
                                                           small_cov_metric):
    mom = standard_onshell_momentum(1, 4)
    l2 = bruteforce_constraint_matrix(2, mom, small_cov_basis, small_cov_metric)
    lm2 = bruteforce_constraint_matrix(-2, mom, small_cov_basis, small_cov_metric)
    l0 = build_L0(mom, small_cov_basis, small_cov_metric)
    vac = small_cov_basis.index[()]
    comm = l2 @ lm2 - lm2 @ l2
    residual = comm - 4 * l0
    assert residual.cols[vac] == {vac: Fraction(4, 2)}   # d/2 at d = 4


def test_hermiticity_against_gram(small_cov_basis, small_cov_metric):
    mom = standard_onshell_momentum(2, 4)
    g = gram(small_cov_basis, small_cov_metric)
    for m in (1, 2):
        assert hermiticity_residual(m, mom, small_cov_basis, small_cov_metric, g) is None


def test_mass_spectrum_values_and_degeneracies():
    rows = mass_spectrum(3, 24, Fraction(1))
    assert [(lvl, int(m2), deg) for lvl, m2, deg in rows] == [
        (0, -2, 1), (1, 0, 24), (2, 2, 324), (3, 4, 3200)]


def test_spectrum_values_agree_across_gauges():
    lc = mass_spectrum(3, 24, Fraction(1))
    cov = mass_spectrum(3, 26, Fraction(1))
    assert [m2 for _, m2, _ in lc] == [m2 for _, m2, _ in cov]
    assert [deg for _, _, deg in lc] != [deg for _, _, deg in cov]


def test_M2_is_diagonal_with_level_eigenvalues(small_lc_basis):
    op = build_M2(small_lc_basis, Fraction(1))
    for j in range(small_lc_basis.dim):
        level = small_lc_basis.levels[j]
        want = {j: 2 * level - 2} if level != 1 else {}
        assert op.cols[j] == want


def test_M2_matches_mode_sum_route(small_lc_basis, small_lc_metric):
    # dual route: 2 sum_n alpha_{-n} . alpha_n - 2a from explicit products
    basis, metric = small_lc_basis, small_lc_metric
    total = build_M2(basis, Fraction(0)) * 0
    for n in range(1, basis.cutoff + 1):
        for mu in range(basis.directions):
            prod = alpha(-n, mu, basis, metric) @ alpha(n, mu, basis, metric)
            total = total + prod * (2 * metric.signs[mu])
    direct = build_M2(basis, Fraction(1))
    for j in range(basis.dim):
        combined = dict(total.cols[j])
        c = combined.get(j, 0) - 2
        if c:
            combined[j] = c
        else:
            combined.pop(j, None)
        assert combined == direct.cols[j]


def test_p_minus_examples(small_lc_basis):
    vac = small_lc_basis.index[()]
    pm = LightConeMomentum(p_plus=Fraction(1), p_tilde=(Fraction(0), Fraction(0)))
    op = build_p_minus(pm, small_lc_basis, Fraction(1))
    assert op.cols[vac] == {vac: Fraction(-1)}
    pm2 = LightConeMomentum(p_plus=Fraction(2), p_tilde=(Fraction(1), Fraction(1)))
    op2 = build_p_minus(pm2, small_lc_basis, Fraction(1))
    for j in small_lc_basis.level_slice(1):
        assert op2.cols[j] == {j: Fraction(1, 2)}
    m2 = build_M2(small_lc_basis, Fraction(1))
    assert (op2 @ m2 - m2 @ op2).is_zero()


def test_p_plus_must_be_positive():
    with pytest.raises(ValueError):
        LightConeMomentum(p_plus=Fraction(0), p_tilde=(Fraction(1),))


def test_vacuum_bracket_defect_pins_the_central_value(small_cov_basis,
                                                      small_cov_metric):
    # the d = 4 defect is d/2, which would fail any other central choice
    mom = standard_onshell_momentum(1, 4)
    vac = small_cov_basis.index[()]
    l0 = build_L0(mom, small_cov_basis, small_cov_metric)
    l2 = build_Lm(2, mom, small_cov_basis, small_cov_metric)
    lm2 = build_Lm(-2, mom, small_cov_basis, small_cov_metric)
    comm = l2 @ lm2 - lm2 @ l2 - 4 * l0
    assert comm.cols[vac] == {vac: central_term(4, 2)}
    assert comm.cols[vac] != {vac: central_term(5, 2)}
