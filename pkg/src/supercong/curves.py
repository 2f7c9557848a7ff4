"""Elliptic-curve families E_d(t), point counting, and Frobenius unit roots.

The four families (d in {2,3,4,6}) are stored in completed-square monic form
y^2 = x^3 + A x^2 + B x + C, valid for p >= 5.  Traces are computed by the
naive quadratic-character sum over x, vectorized over the field; unit roots
are the p-adic unit solutions of T^2 - a_q T + q lifted to p^m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .arith import PrimeModulus, QuadExtResidue, Residue, inv_mod, legendre

TWIST_CONSTANT = {2: -1, 3: -3, 4: -2, 6: -1}

COUNT_BUDGET = 10**6


class BadReduction(ValueError):
    pass


class InvalidT(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class Supersingular(ValueError):
    """Raised when a unit root is requested for a supersingular fiber."""


FieldElem = Union[int, QuadExtResidue]


def _monic_coeffs(d: int, t, inv):
    """(A, B, C) of the completed-square model y^2 = x^3 + Ax^2 + Bx + C.

    t is a field element supporting + * and scalar multiplication; inv(n)
    returns the inverse of a small integer constant in the field.
    """
    if d == 2:
        # y^2 = x(1-x)(x-t) with x -> -x, giving x^3 + (1+t)x^2 + t x
        return t + 1, t, t * 0
    if d == 3:
        # y^2 + xy + (t/27) y = x^3
        return t * 0 + inv(4), t * inv(54), t * t * inv(2916)
    if d == 4:
        return t * 0 + 1, t * inv(4), t * 0
    if d == 6:
        # y^2 + xy = x^3 - t/432
        return t * 0 + inv(4), t * 0, t * (-inv(432))
    raise ValueError(f"d must be in {{2,3,4,6}}, got {d}")


def _cubic_disc(A, B, C):
    return A * B * C * 18 - A * A * A * C * 4 + A * A * B * B - B * B * B * 4 - C * C * 27


@dataclass(frozen=True)
class CurveInstance:
    d: int
    t: FieldElem
    p: int
    q: int
    A: FieldElem
    B: FieldElem
    C: FieldElem
    discriminant: FieldElem


@dataclass(frozen=True)
class FrobData:
    a_q: int
    q: int
    p: int
    ordinary: bool
    unit_root: Optional[Residue]


def build_curve(d: int, t: FieldElem, p: int, q: Optional[int] = None) -> CurveInstance:
    """Construct E_d(t) over F_p (t an int) or F_{p^2} (t a QuadExtResidue)."""
    if p < 5:
        raise ValueError(f"p must be >= 5, got {p}")
    over_ext = isinstance(t, QuadExtResidue)
    if over_ext:
        if t.mod.m != 1 or t.mod.p != p:
            raise ValueError("extension element must live mod p")
        q = p * p
        t_norm = t
        zero = t * 0
        is_zero = t_norm == zero
        is_one = t_norm == zero + 1

        def inv(n):
            return inv_mod(n, p)

    else:
        q = p
        t_norm = t % p

        def inv(n):
            return inv_mod(n, p)

        is_zero = t_norm == 0
        is_one = t_norm == 1
    if is_zero or is_one:
        raise InvalidT(f"t = {t} gives a degenerate fiber")
    A, B, C = _monic_coeffs(d, t_norm if over_ext else Residue(t_norm, PrimeModulus(p, 1)), inv)
    disc = _cubic_disc(A, B, C)
    if (disc == A * 0) if over_ext else disc.value == 0:
        raise BadReduction(f"E_{d}({t}) has bad reduction at p = {p}")
    return CurveInstance(d=d, t=t_norm, p=p, q=q, A=A, B=B, C=C, discriminant=disc)


def _legendre_table(p: int) -> np.ndarray:
    tab = np.full(p, -1, dtype=np.int64)
    sq = (np.arange(p, dtype=np.int64) ** 2) % p
    tab[sq] = 1
    tab[0] = 0
    return tab


def _char_sum_fp(A: int, B: int, C: int, p: int) -> int:
    x = np.arange(p, dtype=np.int64)
    x2 = (x * x) % p
    f = ((x2 * x) % p + (A * x2) % p + (B * x) % p + C) % p
    return int(_legendre_table(p)[f].sum())


def _char_sum_fp2(A, B, C, p: int, nonres: int) -> int:
    """Character sum over F_{p^2} = F_p[s]/(s^2 - nonres); inputs are (a, b) pairs."""
    a = np.repeat(np.arange(p, dtype=np.int64), p)
    b = np.tile(np.arange(p, dtype=np.int64), p)

    def mul(u, v):
        return ((u[0] * v[0]) % p + (nonres * ((u[1] * v[1]) % p))) % p, (
            u[0] * v[1] + u[1] * v[0]
        ) % p

    def add(u, v):
        return (u[0] + v[0]) % p, (u[1] + v[1]) % p

    x = (a, b)
    x2 = mul(x, x)
    x3 = mul(x2, x)
    f = add(add(x3, mul(A, x2)), add(mul(B, x), C))
    norm = ((f[0] * f[0]) % p - nonres * ((f[1] * f[1]) % p)) % p
    return int(_legendre_table(p)[norm].sum())


def _as_pair(elem, p: int):
    if isinstance(elem, QuadExtResidue):
        return (elem.c0 % p, elem.c1 % p)
    return (int(elem.value) % p, 0)


def trace_of_frobenius(curve: CurveInstance) -> int:
    """a_q = q + 1 - #E(F_q) via the quadratic character of the cubic."""
    if curve.q > COUNT_BUDGET:
        raise BudgetExceeded(f"q = {curve.q} exceeds naive counting budget")
    p = curve.p
    if curve.q == p:
        a_q = -_char_sum_fp(curve.A.value, curve.B.value, curve.C.value, p)
    else:
        nonres = curve.A.dbar if isinstance(curve.A, QuadExtResidue) else None
        assert nonres is not None
        A = tuple(np.int64(v) for v in _as_pair(curve.A, p))
        B = tuple(np.int64(v) for v in _as_pair(curve.B, p))
        C = tuple(np.int64(v) for v in _as_pair(curve.C, p))
        a_q = -_char_sum_fp2(A, B, C, p, nonres % p)
    assert a_q * a_q <= 4 * curve.q, f"Hasse bound violated: a_q = {a_q}, q = {curve.q}"
    return a_q


def is_ordinary(curve: CurveInstance, a_q: int) -> bool:
    return a_q % curve.p != 0


def ordinary_via_deuring(n: int, p: int) -> bool:
    """Legendre-symbol ordinariness criterion for the CM fibers: (n/p) = 1."""
    if n % p == 0:
        raise ValueError(f"p = {p} divides the symbol argument {n}")
    return legendre(n, p) == 1


def unit_root(a_q: int, q: int, p: int, m: int) -> Residue:
    """The unit root of T^2 - a_q T + q mod p^m, congruent to a_q mod p."""
    if a_q % p == 0:
        raise Supersingular(f"a_q = {a_q} is divisible by p = {p}")
    mod = PrimeModulus(p, m)
    pm = mod.modulus
    u = a_q % pm
    # the fixed-point map u -> a_q - q/u gains one power of p per step
    for _ in range(m + 1):
        u = (a_q - q * inv_mod(u, pm)) % pm
    assert (u * u - a_q * u + q) % pm == 0
    assert u % p != 0
    return Residue(u, mod)


def frobenius_data(curve: CurveInstance, m: int) -> FrobData:
    a_q = trace_of_frobenius(curve)
    ordinary = is_ordinary(curve, a_q)
    root = unit_root(a_q, curve.q, curve.p, m) if ordinary else None
    return FrobData(a_q=a_q, q=curve.q, p=curve.p, ordinary=ordinary, unit_root=root)


def frobenius_over_Fp2(d: int, t: QuadExtResidue, p: int, m: int) -> FrobData:
    """Trace and unit root for E_d(t) with t in F_{p^2} (typically t not in F_p)."""
    if p * p > COUNT_BUDGET:
        raise BudgetExceeded(f"p^2 = {p * p} exceeds naive counting budget")
    return frobenius_data(build_curve(d, t, p), m)


def twist_trace_check(d: int, t: FieldElem, p: int) -> bool:
    """a_q(E_d(t)) = phi_q(k_d) * a_q(E_d(1-t)) for the quadratic character phi_q."""
    if isinstance(t, QuadExtResidue):
        one_minus = (t * (-1)) + 1
        phi = legendre((TWIST_CONSTANT[d] * TWIST_CONSTANT[d]) % p, p)  # norm of k_d
    else:
        one_minus = (1 - t) % p
        phi = legendre(TWIST_CONSTANT[d], p)
    left = trace_of_frobenius(build_curve(d, t, p))
    right = trace_of_frobenius(build_curve(d, one_minus, p))
    return left == phi * right


def fp2_nonresidue(p: int, preferred: Optional[int] = None) -> int:
    """A quadratic nonresidue mod p to serve as s^2 in F_p[s]/(s^2 - n).

    Uses the caller's preferred discriminant when it is a nonresidue, else
    the smallest positive nonresidue.
    """
    if preferred is not None and legendre(preferred, p) == -1:
        return preferred % p
    n = 2
    while legendre(n, p) != -1:
        n += 1
    return n


def fp2_element(a: int, b: int, p: int, nonres: int) -> QuadExtResidue:
    mod = PrimeModulus(p, 1)
    return QuadExtResidue(a % p, b % p, mod, nonres % p)


def hasse_interval(q: int) -> int:
    return math.isqrt(4 * q)
