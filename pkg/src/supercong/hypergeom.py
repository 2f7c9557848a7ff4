"""Truncated hypergeometric series mod p^m and their exact-rational oracle.

The series in play are F_{alpha,b}(z) = sum_k (alpha*k + 1) * c_k * z^k with
c_k = (b_1)_k ... (b_n)_k / (1)_k^n, truncated at z^N.  Modular evaluation
keeps numerator and denominator p-valuations separate (via exact rationals)
so that reduction mod p^m is always exact; the independent oracle evaluates
the same sums in Q(sqrt(D)) with arbitrary-precision rationals.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .arith import (
    NonUnit,
    PrimeModulus,
    QuadExtResidue,
    QuadSurd,
    Residue,
    frac_mod,
    inv_mod,
    legendre,
)

# Quadratic-twist constants k_d relating t and 1-t fibers.  The finite-field
# trace identity pins k_6 = -1 (same as k_2); d = 6 results are double-checked
# against point counts wherever they enter a congruence.
TWIST_CONSTANT = {2: -1, 3: -3, 4: -2, 6: -1}

HALF = Fraction(1, 2)


class NegativeValuation(ValueError):
    """A series coefficient acquired a p in its denominator."""


def b_params(d: int, with_half: bool) -> tuple[Fraction, ...]:
    """The parameter tuple (1/d, (d-1)/d), optionally prefixed by 1/2."""
    pair = (Fraction(1, d), Fraction(d - 1, d))
    return (HALF,) + pair if with_half else pair


@lru_cache(maxsize=None)
def series_coeffs(b: tuple[Fraction, ...], N: int) -> tuple[Fraction, ...]:
    """Coefficients c_k = prod_i (b_i)_k / (1)_k^n for k = 0..N."""
    coeffs = [Fraction(1)]
    c = Fraction(1)
    for k in range(N):
        for bi in b:
            c *= bi + k
        c /= Fraction(k + 1) ** len(b)
        coeffs.append(c)
    return tuple(coeffs)


@lru_cache(maxsize=None)
def square_coeffs(b: tuple[Fraction, ...], N: int) -> tuple[Fraction, ...]:
    """Coefficients A_k of F_{0,b}(z)^2 for k = 0..N."""
    c = series_coeffs(b, N)
    return tuple(sum(c[j] * c[k - j] for j in range(k + 1)) for k in range(N + 1))


def reduce_coeff(x: Fraction, mod: PrimeModulus) -> Residue:
    """Reduce a series coefficient mod p^m, demanding p-valuation >= 0."""
    if x.denominator % mod.p == 0:
        raise NegativeValuation(f"coefficient {x} has p = {mod.p} in denominator")
    return frac_mod(x, mod)


def rising_ratio(b: tuple[Fraction, ...], k: int, mod: PrimeModulus) -> Residue:
    """prod_i (b_i)_k / (1)_k^n reduced mod p^m."""
    return reduce_coeff(series_coeffs(b, k)[k], mod)


def _lift(x, ring_sample):
    """Coerce a Residue into the quadratic-extension ring when needed."""
    if isinstance(ring_sample, QuadExtResidue) and isinstance(x, Residue):
        return QuadExtResidue(x.value, 0, ring_sample.mod, ring_sample.dbar)
    return x


def trunc_F(alpha, b: tuple[Fraction, ...], lam, N: int, mod: PrimeModulus):
    """[F_{alpha,b}]_N(lam) in the residue ring of lam.

    alpha and lam are embedded values (Residue or QuadExtResidue over the
    same modulus); the result lives in the same ring as lam.
    """
    alpha = _lift(alpha, lam)
    coeffs = series_coeffs(b, N)
    acc = lam * 0
    power = lam * 0 + 1
    for k in range(N + 1):
        ck = reduce_coeff(coeffs[k], mod)
        acc = acc + (alpha * k + 1) * (power * ck.value)
        power = power * lam
    return acc


def trunc_product_F(alpha, b: tuple[Fraction, ...], lam, N: int, mod: PrimeModulus):
    """[F_{0,b} * F_{2*alpha,b}]_N(lam) = sum (alpha*k + 1) A_k lam^k."""
    alpha = _lift(alpha, lam)
    coeffs = square_coeffs(b, N)
    acc = lam * 0
    power = lam * 0 + 1
    for k in range(N + 1):
        ak = reduce_coeff(coeffs[k], mod)
        acc = acc + (alpha * k + 1) * (power * ak.value)
        power = power * lam
    return acc


def exact_trunc_F(alpha: QuadSurd, b: tuple[Fraction, ...], lam: QuadSurd, N: int) -> QuadSurd:
    """The truncated series over exact rationals in Q(sqrt(D)) (oracle path).

    Computed term by term with rising factorials accumulated directly, so it
    shares no code path with the modular evaluation it validates.
    """
    if N > 500:
        raise ValueError("oracle truncation capped at N = 500")
    acc = QuadSurd.rational(1)
    rising = Fraction(1)
    power = QuadSurd.rational(1)
    for k in range(1, N + 1):
        for bi in b:
            rising *= bi + (k - 1)
        rising /= Fraction(k) ** len(b)
        power = power * lam
        acc = acc + (alpha * k + 1) * (power * rising)
    return acc


def exact_trunc_product_F(
    alpha: QuadSurd, b: tuple[Fraction, ...], lam: QuadSurd, N: int
) -> QuadSurd:
    """Exact-rational oracle for the truncated product series."""
    coeffs = square_coeffs(b, N)
    acc = QuadSurd.rational(0)
    power = QuadSurd.rational(1)
    for k in range(N + 1):
        acc = acc + (alpha * k + 1) * (power * coeffs[k])
        power = power * lam
    return acc


def embed_exact(value: QuadSurd, p: int, m: int):
    """Both conjugate reductions of an exact surd value mod p^m (split case)."""
    from .arith import embed_surd

    kind, data = embed_surd(value, p, m)
    if kind != "split":
        raise NonUnit(f"value {value} does not embed in Z_{p}")
    return data


# --- coefficient p-valuation classification -------------------------------


class TruncationClass(Enum):
    UNIT = "unit"
    DIVISIBLE_BY_P_NOT_P2 = "p_not_p2"
    DIVISIBLE_BY_P2 = "p2"


class InvalidD(ValueError):
    pass


def rd_sd(d: int, p: int) -> tuple[int, int]:
    """The thresholds r_d < s_d splitting [0, p-1] by coefficient valuation."""
    if d not in (2, 3, 4, 6):
        raise InvalidD(f"d must be in {{2,3,4,6}}, got {d}")
    if p % d == 1:
        return (p - 1) // d, ((d - 1) * p - (d - 1)) // d
    if p % d == d - 1 or d == 2:
        return (p - (d - 1)) // d, ((d - 1) * p - 1) // d
    raise InvalidD(f"p = {p} is not +-1 mod d = {d}")


def coeff_class(d: int, p: int, k: int):
    """Valuation class of (1/d)_k((d-1)/d)_k/(1)_k^2, plus the half-zero flag.

    Returns (TruncationClass, half_zero) where half_zero marks indices with
    (1/2)_k/(1)_k = 0 mod p, i.e. (p+1)/2 <= k <= p-1.
    """
    if not 0 <= k <= p - 1:
        raise ValueError(f"k must satisfy 0 <= k <= p-1, got {k}")
    r, s = rd_sd(d, p)
    half_zero = (p + 1) // 2 <= k <= p - 1
    if k <= r:
        cls = TruncationClass.UNIT
    elif k <= s:
        cls = TruncationClass.DIVISIBLE_BY_P_NOT_P2
    else:
        cls = TruncationClass.DIVISIBLE_BY_P2
    return cls, half_zero


# --- polynomial-level congruences -----------------------------------------


def _poly_sub_linear(coeffs, a: Fraction, b: Fraction):
    """Compose a polynomial with t -> a + b*t (Horner over Fractions)."""
    out = [Fraction(0)]
    for c in reversed(coeffs):
        # out = out * (a + b t) + c
        shifted = [Fraction(0)] + [b * x for x in out]
        for i, x in enumerate(out):
            shifted[i] += a * x
        shifted[0] += c
        out = shifted
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _poly_mul(f, g):
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] += fi * gj
    return out


def _coeffs_vanish_mod(coeffs, p: int, power: int) -> bool:
    pm = p**power
    mod = PrimeModulus(p, power)
    return all(reduce_coeff(c, mod).value % pm == 0 for c in coeffs)


def p_clausen_poly_check(d: int, p: int) -> bool:
    """[F]_{p-1}(t) - (k_d/p) [F]_{p-1}(1-t) vanishes mod p^2 coefficientwise."""
    b = b_params(d, with_half=False)
    coeffs = list(series_coeffs(b, p - 1))
    flipped = _poly_sub_linear(coeffs, Fraction(1), Fraction(-1))
    sym = legendre(TWIST_CONSTANT[d], p)
    flipped += [Fraction(0)] * (len(coeffs) - len(flipped))
    diff = [c - sym * f for c, f in zip(coeffs, flipped)]
    return _coeffs_vanish_mod(diff, p, 2)


def clausen_square_poly_check(d: int, p: int) -> bool:
    """Polynomial form of the truncated Clausen identity mod p^2.

    [F_{0,(1/2,1/d,(d-1)/d)}]_{p-1}(t) is compared against
    (k_d/p) * [F]_{p-1}((1+s)/2) * [F]_{p-1}((1-s)/2) with s^2 = 1 - t; the
    product is symmetric under s -> -s, hence a polynomial in t.
    """
    b2 = b_params(d, with_half=False)
    b3 = b_params(d, with_half=True)
    base = list(series_coeffs(b2, p - 1))
    plus = _poly_sub_linear(base, HALF, HALF)  # P((1+s)/2) as a poly in s
    minus = _poly_sub_linear(base, HALF, -HALF)
    prod_s = _poly_mul(plus, minus)
    if any(c != 0 for c in prod_s[1::2]):
        return False  # symmetry in s must be exact
    # rewrite sum c_{2j} s^{2j} as a polynomial in t via s^2 = 1 - t
    prod_t = [Fraction(0)] * (len(prod_s[::2]))
    for j, c in enumerate(prod_s[::2]):
        term = _poly_sub_linear([Fraction(0)] * j + [c], Fraction(1), Fraction(-1))
        for i, x in enumerate(term):
            prod_t[i] += x
    three = list(series_coeffs(b3, p - 1))
    sym = legendre(TWIST_CONSTANT[d], p)
    size = max(len(three), len(prod_t))
    three += [Fraction(0)] * (size - len(three))
    prod_t += [Fraction(0)] * (size - len(prod_t))
    diff = [a - sym * c for a, c in zip(three, prod_t)]
    return _coeffs_vanish_mod(diff, p, 2)


def binomial_sum_check(d: int, p: int, t: int) -> bool:
    """The odd/even binomial double sum vanishes mod p^2 at a unit t != 1.

    The branch is selected by (k_d/p): odd binomial indices when the symbol
    is 1 (with no constant term), even indices plus the constant 1 otherwise.
    """
    p2 = p * p
    mod = PrimeModulus(p, 2)
    sym = legendre(TWIST_CONSTANT[d], p)
    one_minus_t = (1 - t) % p2
    b = b_params(d, with_half=False)
    coeffs = series_coeffs(b, p - 1)
    inv2 = inv_mod(2, p2)
    total = 0 if sym == 1 else 1
    for k in range(1, p):
        ck = reduce_coeff(coeffs[k], mod).value
        if ck == 0:
            continue
        inner = 0
        if sym == 1:
            for j in range((k - 1) // 2 + 1):
                inner += _binom(k, 2 * j + 1) * pow(one_minus_t, j, p2)
        else:
            for j in range(k // 2 + 1):
                inner += _binom(k, 2 * j) * pow(one_minus_t, j, p2)
        total += ck * pow(inv2, k, p2) * inner
    return total % p2 == 0


@lru_cache(maxsize=None)
def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def quadratic_transform_check(c: Fraction, a1: Fraction, order: int = 12) -> bool:
    """Formal-series identity linking the 3-parameter series at -4t(t-1) to a
    product of 2-parameter series at t, truncated at the given order.

    Both sides are expanded as power series in t over exact rationals; the
    second factor carries the t-dependent multiplier 2*a1*(1-t)/(1-2t).
    """
    n = order + 1
    b3 = (HALF, c, 1 - c)
    b2 = (c, 1 - c)
    # left side: F_{a1,b3}(z) composed with z = 4t - 4t^2
    c3 = series_coeffs(b3, order)
    z = [Fraction(0), Fraction(4), Fraction(-4)]
    lhs = [Fraction(0)] * n
    zk = [Fraction(1)]
    for k in range(order + 1):
        term = Fraction(a1 * k + 1) * c3[k]
        for i, x in enumerate(zk[:n]):
            lhs[i] += term * x
        zk = _poly_mul(zk, z)[:n]
    # right side: F_{0,b2}(t) * [F_{0,b2}(t) + a2(t) * t * F'_{0,b2}(t)]
    c2 = series_coeffs(b2, order)
    f = [c2[k] for k in range(order + 1)]
    tfp = [Fraction(0)] + [k * c2[k] for k in range(1, order + 1)]  # t * dF/dt
    # a2(t) = 2*a1*(1-t)/(1-2t) expanded as a series
    geo = [Fraction(2) ** k for k in range(n)]  # 1/(1-2t)
    a2 = [2 * a1 * x for x in _poly_mul([Fraction(1), Fraction(-1)], geo)[:n]]
    second = [x + y for x, y in zip(f, _poly_mul(a2, tfp)[:n])]
    rhs = _poly_mul(f, second)[:n]
    return lhs == rhs[: len(lhs)]
