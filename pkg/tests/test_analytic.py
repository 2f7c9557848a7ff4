"""High-precision real identities: series evaluation, gamma products,
Chowla-Selberg periods, and the eta-quotient coefficient oracle."""

from fractions import Fraction

import pytest
from mpmath import mp, mpf, workprec

from supercong.analytic import (
    BudgetExceeded,
    NoConvergence,
    check_special_value,
    check_table1,
    eta_ap_oracle,
    eval_F_real,
    gamma_rational,
    omega_K,
    to_real,
)
from supercong.arith import QuadSurd
from supercong.catalog import load_catalog
from supercong.hypergeom import b_params, exact_trunc_F


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


def test_to_real():
    with workprec(128):
        assert to_real(Fraction(3, 4)) == mpf(3) / 4
        x = to_real(QuadSurd(Fraction(1), Fraction(-1), 2))
        assert abs(x - (1 - mp.sqrt(2))) < mpf(2) ** -120


def test_eval_F_real_trivial():
    assert eval_F_real(0, b_params(2, False), 0) == 1


def test_eval_F_real_matches_truncation():
    # a deep exact truncation bounds the full sum at small |lambda|
    b = b_params(2, False)
    lam = Fraction(1, 64)
    with workprec(256):
        full = eval_F_real(0, b, lam, precision=256)
        part = exact_trunc_F(QuadSurd.rational(0), b, QuadSurd.rational(lam), 200)
        approx = mpf(part.a.numerator) / part.a.denominator
        assert abs(full - approx) < mpf(10) ** -60


def test_eval_F_real_divergent():
    with pytest.raises(NoConvergence):
        eval_F_real(0, b_params(2, False), 2)


def test_gamma_rational():
    with workprec(256):
        assert abs(gamma_rational(Fraction(1)) - 1) < mpf(10) ** -70
        assert abs(gamma_rational(Fraction(1, 2)) - mp.sqrt(mp.pi)) < mpf(10) ** -70
        # reflection: Gamma(1/3) Gamma(2/3) = 2 pi / sqrt(3)
        prod = gamma_rational(Fraction(1, 3)) * gamma_rational(Fraction(2, 3))
        assert abs(prod - 2 * mp.pi / mp.sqrt(3)) < mpf(10) ** -70
    with pytest.raises(ValueError):
        gamma_rational(Fraction(-1, 2))


def test_omega_K_precision_stability(catalog):
    for spec in catalog.omega_fields.values():
        lo = omega_K(spec, 192)
        hi = omega_K(spec, 384)
        assert abs(lo - hi) < mpf(2) ** -160


def test_check_table1_residuals(catalog):
    checked = 0
    for ex in catalog.examples:
        residual = check_table1(ex, 256)
        if residual is None:
            continue
        checked += 1
        assert residual < mpf(10) ** -40, ex.id
    assert checked >= 6


def test_check_table1_negative_control(catalog):
    from dataclasses import replace

    ex = catalog.get("C")
    perturbed = replace(ex, lam=QuadSurd.rational(Fraction(-1, 3) + Fraction(1, 10**4)))
    assert check_table1(perturbed, 256) > mpf(10) ** -6


def test_check_special_values(catalog):
    for sv in catalog.special_values:
        residual = check_special_value(sv, catalog.omega_fields, 256)
        assert residual < mpf(10) ** -40, sv.id


def test_eta_ap_oracle_values():
    from supercong.verify import ap_form

    catalog = load_catalog()
    case = next(w for w in catalog.weight3_cases if w.eta_oracle)
    for p in (7, 11, 13, 17, 19, 23):
        assert eta_ap_oracle(p) == ap_form(case, p), p


def test_eta_ap_oracle_guards():
    with pytest.raises(ValueError):
        eta_ap_oracle(5)
    with pytest.raises(BudgetExceeded):
        eta_ap_oracle(10**5 + 3)
