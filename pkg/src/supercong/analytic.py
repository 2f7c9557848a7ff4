"""Arbitrary-precision real checks: 1/pi series, Chowla-Selberg special
values, and the eta-quotient coefficient oracle.

All floating work uses mpmath with an explicit binary precision; every
series is truncated by a proven geometric tail bound.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Union

from mpmath import mp, mpf, workprec

from .arith import QuadSurd, kronecker, legendre
from .catalog import ExampleRecord, OmegaField, SpecialValue
from .hypergeom import b_params

DEFAULT_PRECISION = 256
MIN_PRECISION = 128
ETA_BUDGET = 10**4


class NoConvergence(ValueError):
    """|lambda| >= 1 under the real embedding."""


class BudgetExceeded(RuntimeError):
    pass


Realish = Union[QuadSurd, Fraction, int]


def to_real(x: Realish) -> mpf:
    """Real embedding with sqrt(D) > 0, at the current working precision."""
    if isinstance(x, QuadSurd):
        a = mpf(x.a.numerator) / x.a.denominator
        b = mpf(x.b.numerator) / x.b.denominator
        return a + b * mp.sqrt(x.D)
    x = Fraction(x)
    return mpf(x.numerator) / x.denominator


def eval_F_real(
    alpha: Realish,
    b: tuple[Fraction, ...],
    lam: Realish,
    eps: Optional[mpf] = None,
    precision: int = DEFAULT_PRECISION,
) -> mpf:
    """sum_k (alpha*k + 1) * prod (b_i)_k / (1)_k^n * lam^k with tail error < eps.

    Since every b_i < 1, the coefficient ratio is < 1 and the tail after the
    k-th term is bounded by c_k |lam|^k (( |alpha| k + 1) r/(1-r) + |alpha| r/(1-r)^2)
    with r = |lam|.
    """
    with workprec(precision):
        if eps is None:
            eps = mpf(2) ** (-(precision - 16))
        a = to_real(alpha)
        z = to_real(lam)
        r = abs(z)
        if r >= 1:
            raise NoConvergence(f"|lambda| = {r} >= 1 under the real embedding")
        total = mpf(1)
        c = mpf(1)
        zk = mpf(1)
        k = 0
        while True:
            k += 1
            for bi in b:
                c *= (mpf(bi.numerator) / bi.denominator + (k - 1)) / k
            zk *= z
            total += (a * k + 1) * c * zk
            tail = c * abs(zk) * ((abs(a) * k + 1) * r / (1 - r) + abs(a) * r / (1 - r) ** 2)
            if tail < eps:
                return +total
            if k > 10**6:
                raise NoConvergence("tail bound did not reach target")


def gamma_rational(x: Fraction, precision: int = DEFAULT_PRECISION) -> mpf:
    if x <= 0:
        raise ValueError(f"argument must be positive, got {x}")
    with workprec(precision):
        return +mp.gamma(mpf(x.numerator) / x.denominator)


def omega_K(spec: OmegaField, precision: int = DEFAULT_PRECISION) -> mpf:
    """(1/sqrt(pi)) * prod_j Gamma(j/D)^(chi(j) n / 4h) for the field of
    discriminant -D, with chi the Kronecker character of -D."""
    with workprec(precision):
        acc = mpf(1) / mp.sqrt(mp.pi)
        expo = mpf(spec.n) / (4 * spec.h)
        for j in range(1, spec.D):
            chi = kronecker(-spec.D, j)
            if chi:
                acc *= mp.gamma(mpf(j) / spec.D) ** (chi * expo)
        return +acc


def _eval_expr(expr: str, precision: int) -> mpf:
    """Evaluate a closed-form constant expression from the catalog."""
    with workprec(precision):
        ns = {
            "rt": mp.sqrt,
            "g": lambda a, b: mp.gamma(mpf(a) / b),
            "pi": mp.pi,
            "Q": lambda a, b: mpf(a) / b,
            "mpf": mpf,
        }
        return +mpf(eval(expr, {"__builtins__": {}}, ns))


def check_table1(ex: ExampleRecord, precision: int = DEFAULT_PRECISION) -> Optional[mpf]:
    """|F_{0,b}(lambda) * F_{2 alpha,b}(lambda) - delta/pi|, or None without a
    closed-form delta."""
    if ex.delta is None:
        return None
    with workprec(precision):
        left = eval_F_real(0, ex.b, ex.lam, precision=precision) * eval_F_real(
            ex.alpha * 2, ex.b, ex.lam, precision=precision
        )
        right = _eval_expr(ex.delta, precision) / mp.pi
        return +abs(left - right)


def check_special_value(
    sv: SpecialValue,
    omega_fields: dict[int, OmegaField],
    precision: int = DEFAULT_PRECISION,
) -> mpf:
    """Max residual over the special-value display and its two Clausen-type
    cross-checks (squared 2-parameter form; squared form at mu)."""
    with workprec(precision):
        b3 = b_params(sv.d, with_half=True)
        lhs = eval_F_real(0, b3, sv.lam, precision=precision)
        omega = omega_K(omega_fields[sv.field], precision)
        rhs = _eval_expr(sv.factor, precision) * omega * omega
        squared = eval_F_real(0, sv.two_param_b, sv.lam, precision=precision) ** 2
        mu_surd = _half_minus_sqrt(sv.lam)
        geom = eval_F_real(0, b_params(sv.d, with_half=False), mu_surd, precision=precision) ** 2
        return +max(abs(lhs - rhs), abs(squared - lhs), abs(geom - lhs))


def _half_minus_sqrt(lam: Fraction) -> QuadSurd:
    one_minus = 1 - lam
    num, den = one_minus.numerator, one_minus.denominator
    core = num * den
    root = 1
    d = 2
    while d * d <= core:
        while core % (d * d) == 0:
            core //= d * d
            root *= d
        d += 1
    # sqrt(one_minus) = root*sqrt(core)/den
    if core == 1:
        return QuadSurd(Fraction(1, 2) - Fraction(root, 2 * den))
    return QuadSurd(Fraction(1, 2), -Fraction(root, 2 * den), core)


def eta_ap_oracle(p: int) -> int:
    """(5/p) times the q^p coefficient of q * prod (1-q^(2n))^3 (1-q^(6n))^3."""
    if p < 7:
        raise ValueError(f"p must be a prime >= 7, got {p}")
    if p > ETA_BUDGET:
        raise BudgetExceeded(f"p = {p} exceeds the eta expansion budget")
    N = p - 1  # need the q^(p-1) coefficient of the product
    coeffs = [0] * (N + 1)
    coeffs[0] = 1
    for step in (2, 6):
        for n in range(step, N + 1, step):
            # multiply by (1 - q^n)^3 = 1 - 3q^n + 3q^(2n) - q^(3n)
            for i in range(N, -1, -1):
                c = coeffs[i]
                if not c:
                    continue
                if i + n <= N:
                    coeffs[i + n] -= 3 * c
                if i + 2 * n <= N:
                    coeffs[i + 2 * n] += 3 * c
                if i + 3 * n <= N:
                    coeffs[i + 3 * n] -= c
    return legendre(5, p) * coeffs[N]
