"""Exact modular arithmetic mod p^m and p-adic embedding of quadratic surds.

All values are immutable; every operation is pure, so sweeps may be run in
parallel across primes without shared state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class NonResidue(ValueError):
    """Requested a square root of a quadratic non-residue."""


class NonUnit(ValueError):
    """Value is divisible by p where a p-adic unit is required."""


class RamifiedOrNonUnit(ValueError):
    """Surd cannot be embedded: p divides D or a denominator."""


# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10^24
# (far beyond any sweep range used here, which stays below 2^64).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(bound: int, start: int = 3):
    """Odd primes p with start <= p < bound, ascending."""
    return [p for p in range(start | 1, bound, 2) if is_prime(p)]


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for odd prime p, via Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else 1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for all integers n != 0."""
    if n == 0:
        raise ValueError("kronecker symbol undefined for n = 0")
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    if n == 1:
        return sign
    # remaining n odd > 1: Jacobi symbol by reciprocity
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def sqrt_mod_p(a: int, p: int) -> int:
    """Square root of a mod p (Tonelli-Shanks), canonical root in [0, p//2].

    Raises NonResidue when (a/p) = -1.
    """
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) == -1:
        raise NonResidue(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


def inv_mod(a: int, modulus: int) -> int:
    """Inverse of a modulo p^m; raises NonUnit when gcd(a, modulus) > 1."""
    try:
        return pow(a, -1, modulus)
    except ValueError:
        raise NonUnit(f"{a} is not a unit mod {modulus}") from None


def hensel_sqrt(a: int, p: int, m: int) -> int:
    """Lift sqrt_mod_p(a, p) to a root of x^2 = a mod p^m (Newton iteration).

    Canonical choice: the smaller of the two roots. Requires gcd(a, p) = 1.
    """
    pm = p**m
    a %= pm
    if a % p == 0:
        raise NonUnit(f"hensel_sqrt needs a unit argument, got {a} at p={p}")
    r = sqrt_mod_p(a, p)
    inv2 = inv_mod(2, pm)
    for _ in range(m - 1):
        r = (r + a * inv_mod(r, pm)) * inv2 % pm
    assert r * r % pm == a
    return min(r, pm - r)


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime power p^m with m in {1, 2, 3}."""

    p: int
    m: int

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.m not in (1, 2, 3):
            raise ValueError(f"m must be in {{1,2,3}}, got {self.m}")

    @property
    def modulus(self) -> int:
        return self.p**self.m


@dataclass(frozen=True)
class Residue:
    """An integer mod p^m. Arithmetic never mixes distinct moduli."""

    value: int
    mod: PrimeModulus

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.mod.modulus)

    def _coerce(self, other) -> "Residue":
        if isinstance(other, Residue):
            if other.mod != self.mod:
                raise ValueError("mixed moduli in Residue arithmetic")
            return other
        return Residue(other, self.mod)

    def __add__(self, other):
        o = self._coerce(other)
        return Residue(self.value + o.value, self.mod)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Residue(self.value - o.value, self.mod)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return Residue(self.value * o.value, self.mod)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.mod)

    def __pow__(self, k: int):
        return Residue(pow(self.value, k, self.mod.modulus), self.mod)

    def inverse(self) -> "Residue":
        return Residue(inv_mod(self.value, self.mod.modulus), self.mod)

    def reduce(self, m: int) -> "Residue":
        """Reduce to the smaller precision p^m."""
        return Residue(self.value, PrimeModulus(self.mod.p, m))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.mod.modulus
        return self.value == other.value and self.mod == other.mod

    def __hash__(self):
        return hash((self.value, self.mod))

    def __repr__(self):
        return f"{self.value} (mod {self.mod.p}^{self.mod.m})"


@dataclass(frozen=True)
class QuadExtResidue:
    """c0 + c1*s in (Z/p^m)[s]/(s^2 - dbar), for dbar a non-residue mod p."""

    c0: int
    c1: int
    mod: PrimeModulus
    dbar: int

    def __post_init__(self):
        pm = self.mod.modulus
        object.__setattr__(self, "c0", self.c0 % pm)
        object.__setattr__(self, "c1", self.c1 % pm)
        object.__setattr__(self, "dbar", self.dbar % pm)

    def _coerce(self, other) -> "QuadExtResidue":
        if isinstance(other, QuadExtResidue):
            if other.mod != self.mod or other.dbar != self.dbar:
                raise ValueError("mixed rings in QuadExtResidue arithmetic")
            return other
        if isinstance(other, Residue):
            if other.mod != self.mod:
                raise ValueError("mixed moduli")
            return QuadExtResidue(other.value, 0, self.mod, self.dbar)
        return QuadExtResidue(other, 0, self.mod, self.dbar)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadExtResidue(self.c0 + o.c0, self.c1 + o.c1, self.mod, self.dbar)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return QuadExtResidue(self.c0 - o.c0, self.c1 - o.c1, self.mod, self.dbar)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        pm = self.mod.modulus
        c0 = (self.c0 * o.c0 + self.dbar * self.c1 * o.c1) % pm
        c1 = (self.c0 * o.c1 + self.c1 * o.c0) % pm
        return QuadExtResidue(c0, c1, self.mod, self.dbar)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadExtResidue(-self.c0, -self.c1, self.mod, self.dbar)

    def __pow__(self, k: int):
        result = QuadExtResidue(1, 0, self.mod, self.dbar)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "QuadExtResidue":
        return QuadExtResidue(self.c0, -self.c1, self.mod, self.dbar)

    def __eq__(self, other):
        o = self._coerce(other)
        return self.c0 == o.c0 and self.c1 == o.c1

    def __hash__(self):
        return hash((self.c0, self.c1, self.mod, self.dbar))

    def __repr__(self):
        return f"{self.c0} + {self.c1}*s (mod {self.mod.p}^{self.mod.m})"


def _squarefree(n: int) -> bool:
    if n < 1:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class QuadSurd:
    """Exact a + b*sqrt(D) with rational a, b and squarefree D >= 1.

    D = 1 encodes a plain rational (then b is folded into a).
    """

    a: Fraction
    b: Fraction = Fraction(0)
    D: int = 1

    def __post_init__(self):
        a, b, D = Fraction(self.a), Fraction(self.b), self.D
        if D == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            D = 1
        if not _squarefree(D):
            raise ValueError(f"D must be squarefree >= 1, got {D}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "D", D)

    @classmethod
    def rational(cls, x) -> "QuadSurd":
        return cls(Fraction(x))

    @property
    def is_rational(self) -> bool:
        return self.D == 1

    def _coerce(self, other) -> "QuadSurd":
        if isinstance(other, QuadSurd):
            if other.D != 1 and self.D != 1 and other.D != self.D:
                raise ValueError(f"mixed radicands {self.D} and {other.D}")
            return other
        return QuadSurd(Fraction(other))

    def _common_D(self, o: "QuadSurd") -> int:
        return self.D if self.D != 1 else o.D

    def __add__(self, other):
        o = self._coerce(other)
        return QuadSurd(self.a + o.a, self.b + o.b, self._common_D(o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return QuadSurd(self.a - o.a, self.b - o.b, self._common_D(o))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        D = self._common_D(o)
        return QuadSurd(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.D)

    def conjugate(self) -> "QuadSurd":
        return QuadSurd(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def inverse(self) -> "QuadSurd":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero surd")
        return QuadSurd(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        result = QuadSurd.rational(1)
        base = self
        for _ in range(k):
            result = result * base
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.D == o.D)

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __float__(self):
        return float(self.a) + float(self.b) * self.D**0.5

    def __repr__(self):
        if self.is_rational:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.D})"


def frac_mod(x: Fraction, mod: PrimeModulus) -> Residue:
    """Reduce a p-integral rational mod p^m.

    The numerator may carry powers of p; the denominator must not.
    """
    pm = mod.modulus
    num, den = x.numerator, x.denominator
    if den % mod.p == 0:
        raise NonUnit(f"denominator of {x} divisible by {mod.p}")
    return Residue(num % pm * inv_mod(den, pm), mod)


def embed_surd(x: QuadSurd, p: int, m: int):
    """Embed a + b*sqrt(D) into Z/p^m.

    Returns ('split', (r_plus, r_minus)) with the two conjugate embeddings
    (duplicated for rational x), or ('inert', QuadExtResidue) when (D/p) = -1.
    Raises RamifiedOrNonUnit when p | D or p divides a denominator.
    """
    mod = PrimeModulus(p, m)
    if x.a.denominator % p == 0 or x.b.denominator % p == 0:
        raise RamifiedOrNonUnit(f"denominator of {x} divisible by {p}")
    a = frac_mod(x.a, mod)
    if x.is_rational:
        return ("split", (a, a))
    if x.D % p == 0:
        raise RamifiedOrNonUnit(f"p = {p} ramifies in Q(sqrt({x.D}))")
    b = frac_mod(x.b, mod)
    sym = legendre(x.D, p)
    if sym == 1:
        r = Residue(hensel_sqrt(x.D, p, m), mod)
        return ("split", (a + b * r, a - b * r))
    ext = QuadExtResidue(a.value, b.value, mod, x.D)
    return ("inert", ext)
