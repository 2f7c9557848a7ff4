"""Modular arithmetic and surd embedding tests.

Small closed-form values are frozen from independent hand computation;
structural laws are exercised with hypothesis.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supercong.arith import (
    NonResidue,
    NonUnit,
    PrimeModulus,
    QuadSurd,
    RamifiedOrNonUnit,
    Residue,
    embed_surd,
    frac_mod,
    hensel_sqrt,
    inv_mod,
    is_prime,
    kronecker,
    legendre,
    primes_up_to,
    sqrt_mod_p,
)

SMALL_PRIMES = primes_up_to(100)

prime_st = st.sampled_from(SMALL_PRIMES)


def test_is_prime_basics():
    assert [n for n in range(2, 30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert not is_prime(1)
    assert not is_prime(561)  # Carmichael
    assert is_prime(2**31 - 1)


def test_primes_up_to_excludes_bound():
    assert primes_up_to(41)[-1] == 37
    assert primes_up_to(42)[-1] == 41
    assert primes_up_to(2) == []


def test_legendre_known_values():
    assert legendre(1, 13) == 1
    assert legendre(2, 7) == 1  # 3^2 = 2 mod 7
    assert legendre(-1, 7) == -1
    assert legendre(0, 5) == 0


@given(prime_st, st.integers(-50, 50), st.integers(-50, 50))
def test_legendre_multiplicative(p, a, b):
    assert legendre(a * b, p) == legendre(a, p) * legendre(b, p)


@given(prime_st, st.integers(-100, 100))
def test_kronecker_matches_legendre_on_odd_primes(p, a):
    assert kronecker(a, p) == legendre(a, p)


def test_kronecker_at_two():
    # (a/2) is 0 for even a, (-1)^((a^2-1)/8) for odd a
    assert kronecker(6, 2) == 0
    assert kronecker(7, 2) == 1
    assert kronecker(3, 2) == -1
    with pytest.raises(ValueError):
        kronecker(5, 0)


def test_sqrt_mod_p():
    assert sqrt_mod_p(0, 11) == 0
    assert sqrt_mod_p(2, 7) in (3, 4)
    with pytest.raises(NonResidue):
        sqrt_mod_p(3, 7)


@given(prime_st, st.integers(1, 500))
def test_sqrt_mod_p_squares_back(p, x):
    r = sqrt_mod_p(x * x % p, p)
    assert r * r % p == x * x % p
    assert r <= p // 2  # canonical root


def test_hensel_sqrt_values():
    assert hensel_sqrt(2, 7, 3) == 108
    assert 108 * 108 % 343 == 2
    assert hensel_sqrt(1, 11, 2) == 1
    assert hensel_sqrt(4, 5, 2) in (2, 23)
    with pytest.raises(NonUnit):
        hensel_sqrt(5, 5, 2)


@given(prime_st, st.integers(1, 200), st.sampled_from([1, 2, 3]))
def test_hensel_sqrt_lifts(p, x, m):
    if x % p == 0:
        return
    r = hensel_sqrt(x * x % p**m, p, m)
    assert r * r % p**m == x * x % p**m


def test_inv_mod():
    assert inv_mod(1, 343) == 1
    assert inv_mod(3, 25) == 17
    with pytest.raises(NonUnit):
        inv_mod(5, 25)


def test_prime_modulus_rejects_bad_input():
    with pytest.raises(ValueError):
        PrimeModulus(4, 2)
    with pytest.raises(ValueError):
        PrimeModulus(7, 4)


@given(st.integers(-200, 200), st.integers(-200, 200), st.integers(-200, 200))
def test_residue_ring_laws(a, b, c):
    mod = PrimeModulus(7, 2)
    x, y, z = Residue(a, mod), Residue(b, mod), Residue(c, mod)
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert x + (-x) == 0
    if x.value % 7:
        assert x * x.inverse() == 1


def test_residue_refuses_mixed_moduli():
    with pytest.raises(ValueError):
        Residue(1, PrimeModulus(7, 2)) + Residue(1, PrimeModulus(7, 1))


def test_frac_mod():
    mod = PrimeModulus(13, 2)
    assert frac_mod(Fraction(-1, 3), mod) == Residue(-1 * inv_mod(3, 169), mod)
    assert frac_mod(Fraction(13, 2), mod).value % 13 == 0  # numerator may carry p
    with pytest.raises(NonUnit):
        frac_mod(Fraction(1, 13), mod)


def test_quad_surd_canonicalization():
    assert QuadSurd(Fraction(1), Fraction(2), 1) == QuadSurd(Fraction(3))
    assert QuadSurd(Fraction(1), Fraction(0), 5).is_rational
    with pytest.raises(ValueError):
        QuadSurd(Fraction(0), Fraction(1), 4)


@given(
    st.fractions(max_denominator=20),
    st.fractions(max_denominator=20),
    st.fractions(max_denominator=20),
    st.fractions(max_denominator=20),
)
def test_quad_surd_field_laws(a, b, c, d):
    x = QuadSurd(a, b, 2)
    y = QuadSurd(c, d, 2)
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert x.norm() == x.a * x.a - 2 * x.b * x.b
    if x.norm() != 0:
        assert x * x.inverse() == QuadSurd.rational(1)


def test_embed_surd_split():
    # (3 - 2*sqrt(2))/6 at p = 7, m = 2
    x = QuadSurd(Fraction(1, 2), Fraction(-1, 3), 2)
    kind, (rp, rm) = embed_surd(x, 7, 2)
    assert kind == "split"
    r = hensel_sqrt(2, 7, 2)
    assert 6 * rp.value % 49 == (3 - 2 * r) % 49
    assert 6 * rm.value % 49 == (3 + 2 * r) % 49


def test_embed_surd_rational_duplicates():
    kind, pair = embed_surd(QuadSurd.rational(5), 11, 2)
    assert kind == "split"
    assert pair[0] == pair[1] == 5


def test_embed_surd_inert():
    kind, ext = embed_surd(QuadSurd(Fraction(0), Fraction(1), 5), 7, 2)
    assert kind == "inert"
    assert (ext.c0, ext.c1) == (0, 1)


def test_embed_surd_ramified_or_nonunit():
    with pytest.raises(RamifiedOrNonUnit):
        embed_surd(QuadSurd(Fraction(0), Fraction(1), 5), 5, 1)
    with pytest.raises(RamifiedOrNonUnit):
        embed_surd(QuadSurd(Fraction(1, 7), Fraction(0), 1), 7, 1)


@settings(max_examples=50)
@given(prime_st, st.fractions(max_denominator=10), st.fractions(max_denominator=10))
def test_embed_surd_branches_are_conjugate(p, a, b):
    x = QuadSurd(a, b, 3)
    if a.denominator % p == 0 or b.denominator % p == 0 or p == 3:
        return
    kind, data = embed_surd(x, p, 2)
    if kind == "split":
        rp, rm = data
        # sum and product match trace and norm
        assert (rp + rm) == frac_mod(2 * a, rp.mod)
        assert rp * rm == frac_mod(x.norm(), rp.mod)
