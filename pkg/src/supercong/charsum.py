"""Gauss sums over F_p and F_{p^2} and the finite hypergeometric sums H_q.

Everything is evaluated in an arbitrary-precision complex model (gmpy2.mpc):
the additive character is zeta_p^Tr, the multiplicative characters are the
powers of a fixed generator omega of the dual group, and every H_q value is
asserted to be near a rational integer before rounding.  Rounded values are
independently validated against point counts elsewhere.
"""

from __future__ import annotations

from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from .arith import inv_mod, legendre, sqrt_mod_p
from .curves import TWIST_CONSTANT, build_curve, fp2_nonresidue, trace_of_frobenius

DEFAULT_PRECISION = 128
MAX_PRECISION = 1024
INTEGRALITY_TOL = 1e-6


class NotNearIntegral(ArithmeticError):
    """The complex value did not round cleanly; raise precision and retry."""


_escalations = 0


def escalation_count() -> int:
    """How many H_q evaluations needed more than their base precision."""
    return _escalations


def reset_escalations() -> None:
    global _escalations
    _escalations = 0


def _prime_factors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _fp2_mul(u, v, p, n):
    return ((u[0] * v[0] + n * u[1] * v[1]) % p, (u[0] * v[1] + u[1] * v[0]) % p)


def _fp2_pow(base, k, p, n):
    result = (1, 0)
    while k:
        if k & 1:
            result = _fp2_mul(result, base, p, n)
        base = _fp2_mul(base, base, p, n)
        k >>= 1
    return result


class FqContext:
    """Fixed character data for one finite field F_q, q = p^f with f in {1,2}.

    Immutable after construction; holds the generator, the discrete-log
    table, and the full Gauss-sum table g(omega^j) at the chosen precision.
    """

    def __init__(self, p: int, f: int, precision: int = DEFAULT_PRECISION, nonres=None):
        if f not in (1, 2):
            raise ValueError("f must be 1 or 2")
        self.p = p
        self.f = f
        self.q = p**f
        self.precision = precision
        self.nonres = fp2_nonresidue(p, nonres) if f == 2 else None
        self._build_generator()
        self._build_tables()

    # -- field structure ----------------------------------------------------

    def _order_ok(self, elem) -> bool:
        n = self.q - 1
        for ell in _prime_factors(n):
            if self.f == 1:
                if pow(elem, n // ell, self.p) == 1:
                    return False
            else:
                if _fp2_pow(elem, n // ell, self.p, self.nonres) == (1, 0):
                    return False
        return True

    def _build_generator(self):
        if self.f == 1:
            g = 2
            while not self._order_ok(g):
                g += 1
            self.generator = g
        else:
            found = None
            for a in range(self.p):
                for b in range(1, self.p):
                    if self._order_ok((a, b)):
                        found = (a, b)
                        break
                if found:
                    break
            assert found is not None
            self.generator = found

    def _index(self, x) -> int:
        """Flat table index of a field element."""
        if self.f == 1:
            return x % self.p
        return (x[0] % self.p) * self.p + x[1] % self.p

    def _trace(self, x) -> int:
        # for f=2 with s^2 = nonresidue, s^p = -s, so Tr(a + bs) = 2a
        if self.f == 1:
            return x % self.p
        return 2 * x[0] % self.p

    def dlog(self, x) -> int:
        idx = self._index(x)
        k = self._dlog[idx]
        if k < 0:
            raise ZeroDivisionError("discrete log of zero")
        return k

    # -- complex tables -----------------------------------------------------

    def _build_tables(self):
        p, q, n = self.p, self.q, self.q - 1
        with gmpy2.context(precision=self.precision):
            two_pi = 2 * gmpy2.const_pi()
            zeta = gmpy2.exp(mpc(0, two_pi / p))
            rho = gmpy2.exp(mpc(0, two_pi / n))
            zeta_pow = [gmpy2.mpc(1)]
            for _ in range(p - 1):
                zeta_pow.append(zeta_pow[-1] * zeta)
            rho_pow = [gmpy2.mpc(1)]
            for _ in range(n - 1):
                rho_pow.append(rho_pow[-1] * rho)
            self.rho_pow = rho_pow

            # enumerate generator powers; record dlogs and psi values
            self._dlog = [-1] * (q if self.f == 2 else p)
            psi = [None] * n
            x = 1 if self.f == 1 else (1, 0)
            for k in range(n):
                self._dlog[self._index(x)] = k
                psi[k] = zeta_pow[self._trace(x)]
                if self.f == 1:
                    x = x * self.generator % p
                else:
                    x = _fp2_mul(x, self.generator, p, self.nonres)

            # Gauss sums g(omega^j) = sum_k psi(g^k) rho^{jk}
            gauss = []
            for j in range(n):
                acc = gmpy2.mpc(0)
                jk = 0
                for k in range(n):
                    acc += psi[k] * rho_pow[jk]
                    jk += j
                    if jk >= n:
                        jk -= n
                gauss.append(acc)
            self.gauss = gauss

    def omega(self, j: int, x) -> mpc:
        """omega^j evaluated at the nonzero field element x."""
        return self.rho_pow[(j * self.dlog(x)) % (self.q - 1)]

    def phi(self, x) -> int:
        """The quadratic character as +-1 (x must be nonzero)."""
        return 1 if self.dlog(x) % 2 == 0 else -1


@lru_cache(maxsize=32)
def get_context(p: int, f: int, precision: int = DEFAULT_PRECISION, nonres=None) -> FqContext:
    return FqContext(p, f, precision, nonres)


def gauss_sum(ctx: FqContext, j: int) -> mpc:
    return ctx.gauss[j % (ctx.q - 1)]


def s_d_factor(ctx: FqContext, j: int, d: int) -> mpc:
    """The Gauss-sum ratio S_d(omega^j), for d in {3, 4, 6}."""
    q = ctx.q
    if d == 3:
        scale = ctx.omega(j, _invert_in(ctx, 27))
        return gauss_sum(ctx, 3 * j) / gauss_sum(ctx, j) * scale
    if d == 4:
        scale = ctx.omega(j, _invert_in(ctx, 64))
        return gauss_sum(ctx, 4 * j) / gauss_sum(ctx, 2 * j) * scale
    if d == 6:
        scale = ctx.omega(j, _invert_in(ctx, 432))
        num = gauss_sum(ctx, j) * gauss_sum(ctx, 6 * j)
        den = gauss_sum(ctx, 2 * j) * gauss_sum(ctx, 3 * j)
        return num / den * scale
    raise ValueError(f"S_d defined for d in {{3,4,6}}, got {d}")


def _invert_in(ctx: FqContext, c: int):
    v = inv_mod(c, ctx.p)
    return v if ctx.f == 1 else (v, 0)


def _negate_in(ctx: FqContext, t):
    if ctx.f == 1:
        return (-t) % ctx.p
    return ((-t[0]) % ctx.p, (-t[1]) % ctx.p)


def _round_integral(value: mpc, tol: float = INTEGRALITY_TOL) -> int:
    re, im = mpfr(value.real), mpfr(value.imag)
    nearest = int(gmpy2.rint(re))
    if abs(im) > tol or abs(re - nearest) > tol:
        raise NotNearIntegral(f"value {value} is not near an integer")
    return nearest


def H_q_raw(ctx: FqContext, n_params: int, d: int, t) -> mpc:
    """The finite hypergeometric sum for the four parameter shapes in use.

    n_params=2 selects {1/d,(d-1)/d}; n_params=3 selects {1/2,1/d,(d-1)/d};
    d=2 uses the all-halves displays.  t is a nonzero field element.
    """
    q = ctx.q
    n = q - 1
    half = n // 2
    with gmpy2.context(precision=ctx.precision):
        acc = gmpy2.mpc(0)
        if n_params == 2 and d == 2:
            for k in range(n):
                acc += gauss_sum(ctx, half + k) ** 2 * gauss_sum(ctx, -k) ** 2 * ctx.omega(k, t)
            phi_m1 = ctx.phi(_negate_in(ctx, _invert_in(ctx, 1)))
            return acc * phi_m1 / (q * (1 - q))
        if n_params == 3 and d == 2:
            mt = _negate_in(ctx, t)
            for k in range(n):
                acc += gauss_sum(ctx, half + k) ** 3 * gauss_sum(ctx, -k) ** 3 * ctx.omega(k, mt)
            return acc * gauss_sum(ctx, half) / (q * q * (q - 1))
        if n_params == 2:
            for k in range(n):
                acc += gauss_sum(ctx, -k) ** 2 * s_d_factor(ctx, k, d) * ctx.omega(k, t)
            return acc / (1 - q)
        if n_params == 3:
            mt = _negate_in(ctx, t)
            for k in range(n):
                acc += (
                    gauss_sum(ctx, half + k)
                    * gauss_sum(ctx, -k) ** 3
                    * s_d_factor(ctx, k, d)
                    * ctx.omega(k, mt)
                )
            phi_m1 = ctx.phi(_negate_in(ctx, _invert_in(ctx, 1)))
            return acc * phi_m1 * gauss_sum(ctx, half) / (q * (q - 1))
    raise ValueError(f"unsupported shape ({n_params}, {d})")


def H_q(p: int, f: int, n_params: int, d: int, t, precision: int = DEFAULT_PRECISION, nonres=None) -> int:
    """H_q rounded to an integer, escalating precision on rounding failure."""
    bits = precision
    while True:
        ctx = get_context(p, f, bits, nonres)
        try:
            return _round_integral(H_q_raw(ctx, n_params, d, t))
        except NotNearIntegral:
            if bits >= MAX_PRECISION:
                raise
            global _escalations
            _escalations += 1
            bits *= 2


def hp_trace_equality(d: int, t, p: int, f: int = 1, nonres=None) -> bool:
    """H_q(2-parameter d-datum; t) = a_q of E_d(t), both computed independently."""
    value = H_q(p, f, 2, d, t, nonres=nonres)
    if f == 1:
        curve_t = t % p
    else:
        from .curves import fp2_element

        nr = fp2_nonresidue(p, nonres)
        curve_t = fp2_element(t[0], t[1], p, nr)
    a_q = trace_of_frobenius(build_curve(d, curve_t, p))
    return value == a_q


def twist_identity(d: int, t, p: int, f: int = 1, nonres=None) -> bool:
    """H_q(d-datum; t) = phi_q(k_d) H_q(d-datum; 1-t)."""
    kd = TWIST_CONSTANT[d]
    if f == 1:
        one_minus = (1 - t) % p
        phi = legendre(kd, p)
    else:
        one_minus = ((1 - t[0]) % p, (-t[1]) % p)
        phi = 1 if kd % p else 0  # norm of a nonzero F_p scalar is a square
    left = H_q(p, f, 2, d, t, nonres=nonres)
    right = H_q(p, f, 2, d, one_minus, nonres=nonres)
    return left == phi * right


def clausen_check(p: int, d: int, t: int) -> bool:
    """The H_p Clausen-type identity at t in F_p (t = 1 allowed).

    Square branch: H_p(3-datum;t) = H_p(2-datum;(1-sqrt(1-t))/2)^2 - p.
    Nonsquare branch: H_p(3-datum;t) = (k_d/p) H_{p^2}(2-datum; mu) - p
    with mu in F_{p^2}.  At t = 1 the correction is (1 + (k_d/p)) p.
    """
    t %= p
    if t == 0:
        raise ValueError("t = 0 not allowed")
    lhs = H_q(p, 1, 3, d, t)
    kd_sym = legendre(TWIST_CONSTANT[d], p)
    if t == 1:
        inner = H_q(p, 1, 2, d, inv_mod(2, p))
        return lhs == inner * inner - (1 + kd_sym) * p
    disc = (1 - t) % p
    if legendre(disc, p) == 1:
        r = sqrt_mod_p(disc, p)
        ok = True
        for root in {r, (p - r) % p}:
            mu = (1 - root) * inv_mod(2, p) % p
            inner = H_q(p, 1, 2, d, mu)
            ok = ok and lhs == inner * inner - p
        return ok
    nr = fp2_nonresidue(p)
    c = sqrt_mod_p(disc * inv_mod(nr, p) % p, p)  # sqrt(1-t) = c*s
    ok = True
    for root in {c, (p - c) % p}:
        inv2 = inv_mod(2, p)
        mu = (inv2, (-root) * inv2 % p)
        inner = H_q(p, 2, 2, d, mu, nonres=nr)
        ok = ok and lhs == kd_sym * inner - p
    return ok


def clausen_quartic_check(p: int, t: int) -> bool:
    """((1-t)/p) H_p({1/2,1/2,1/2};t) = H_p({1/4,3/4};t/(t-1))^2 - p."""
    t %= p
    if t in (0, 1):
        raise ValueError("t must avoid 0, 1")
    lhs = legendre(1 - t, p) * H_q(p, 1, 3, 2, t)
    arg = t * inv_mod(t - 1, p) % p
    inner = H_q(p, 1, 2, 4, arg)
    return lhs == inner * inner - p


def h_at_one(p: int, d: int) -> int:
    """H_p(2-parameter d-datum; 1); the trace theorem says this is (k_d/p)."""
    return H_q(p, 1, 2, d, 1)
