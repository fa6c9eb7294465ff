"""Exact arithmetic in Z and the Gaussian integers Z[i].

Elements are immutable pairs of arbitrary-precision integers tagged with
their ring.  Both rings are Euclidean, so gcds, canonical associates and
prime factorizations are all computed exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

RING_Z = "Z"
RING_ZI = "Zi"

#: degree of the fraction field over Q, per ring
FIELD_DEGREE = {RING_Z: 1, RING_ZI: 2}


class RingMismatchError(ValueError):
    pass


class ZeroIdealError(ValueError):
    pass


@dataclass(frozen=True)
class RingElement:
    ring: str
    a: int
    b: int = 0

    def __post_init__(self):
        if self.ring not in (RING_Z, RING_ZI):
            raise ValueError(f"unknown ring tag {self.ring!r}")
        if self.ring == RING_Z and self.b != 0:
            raise ValueError("Z elements must have zero imaginary part")

    def _check(self, other: "RingElement") -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other):
        self._check(other)
        return RingElement(self.ring, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        self._check(other)
        return RingElement(self.ring, self.a - other.a, self.b - other.b)

    def __neg__(self):
        return RingElement(self.ring, -self.a, -self.b)

    def __mul__(self, other):
        self._check(other)
        if self.ring == RING_Z:
            return RingElement(RING_Z, self.a * other.a)
        return RingElement(
            RING_ZI,
            self.a * other.a - self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def conj(self) -> "RingElement":
        return RingElement(self.ring, self.a, -self.b)

    def is_unit(self) -> bool:
        return norm(self) == 1

    def __str__(self):
        if self.ring == RING_Z:
            return str(self.a)
        if self.b == 0:
            return str(self.a)
        sign = "+" if self.b >= 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}i"


def zel(n: int) -> RingElement:
    return RingElement(RING_Z, n)


def gel(a: int, b: int = 0) -> RingElement:
    return RingElement(RING_ZI, a, b)


def zero(ring: str) -> RingElement:
    return RingElement(ring, 0)


def one(ring: str) -> RingElement:
    return RingElement(ring, 1)


def from_int(ring: str, n: int) -> RingElement:
    return RingElement(ring, n)


def parse_element(ring: str, text: str) -> RingElement:
    """Parse the decimal serialization: "-2", "3+4i", "1-2i", "i", "-i"."""
    s = text.strip().replace(" ", "")
    if ring == RING_Z:
        return zel(int(s))
    if "i" not in s:
        return gel(int(s))
    # split off the imaginary tail ending in "i"
    body = s[:-1]
    # find the sign separating real and imaginary parts (not a leading sign)
    split = None
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "+-eE":
            split = k
            break
    if split is None:
        re_part, im_part = "0", body
    else:
        re_part, im_part = body[:split], body[split:]
    if im_part in ("", "+"):
        im = 1
    elif im_part == "-":
        im = -1
    else:
        im = int(im_part)
    return gel(int(re_part), im)


def norm(x: RingElement) -> int:
    """Field norm to Z: |a| over Z, a^2+b^2 over Z[i]."""
    if x.ring == RING_Z:
        return abs(x.a)
    return x.a * x.a + x.b * x.b


def ceil_element(x: RingElement) -> float:
    """Max absolute value of the conjugate roots: |a| over Z, sqrt(a^2+b^2) over Z[i]."""
    if x.ring == RING_Z:
        return float(abs(x.a))
    return math.sqrt(x.a * x.a + x.b * x.b)


def _round_div(n: int, d: int) -> int:
    # nearest integer to n/d, d > 0
    return (2 * n + d) // (2 * d)


def euclid_divmod(x: RingElement, y: RingElement) -> tuple[RingElement, RingElement]:
    """Euclidean division x = q*y + r with norm(r) < norm(y)."""
    x._check(y)
    if not y:
        raise ZeroDivisionError("division by zero ring element")
    if x.ring == RING_Z:
        q, r = divmod(x.a, y.a)
        # python's remainder carries the divisor's sign, so stepping q up
        # always shrinks an oversized remainder
        if 2 * abs(r) > abs(y.a):
            q += 1
            r -= y.a
        return zel(q), zel(r)
    d = norm(y)
    num = x * y.conj()
    q = gel(_round_div(num.a, d), _round_div(num.b, d))
    r = x - q * y
    return q, r


def exact_div(x: RingElement, y: RingElement) -> RingElement:
    q, r = euclid_divmod(x, y)
    if r:
        raise ValueError(f"{y} does not divide {x}")
    return q


def divides(y: RingElement, x: RingElement) -> bool:
    if not y:
        return not x
    _, r = euclid_divmod(x, y)
    return not r


def canonical_associate(x: RingElement) -> RingElement:
    """The canonical representative among the associates of x.

    Z: |a|.  Z[i]: the unique rotation by a power of i with a > 0, b >= 0
    (or zero).  Idempotent.
    """
    if not x:
        return x
    if x.ring == RING_Z:
        return zel(abs(x.a))
    cur = x
    i_unit = gel(0, 1)
    for _ in range(4):
        if cur.a > 0 and cur.b >= 0:
            return cur
        cur = cur * i_unit
    raise AssertionError("unreachable: some rotation must be canonical")


def canonical_unit(x: RingElement) -> RingElement:
    """Unit u with canonical_associate(x) = u * x (u = 1 for x = 0)."""
    if not x:
        return one(x.ring)
    c = canonical_associate(x)
    return exact_div(c, x)


def euclid_gcd(x: RingElement, y: RingElement) -> RingElement:
    """Canonical associate of a gcd; gcd(0, 0) = 0."""
    x._check(y)
    while y:
        _, r = euclid_divmod(x, y)
        x, y = y, r
    return canonical_associate(x)


# ---------------------------------------------------------------------------
# integer primality / factorization (trial division + Pollard's rho)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime_int(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
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


def _pollard_rho(n: int, rng: random.Random) -> int:
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(0, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1."""
    if n < 1:
        raise ValueError("factor_int requires n >= 1")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    # deterministic seeding keeps runs reproducible
    rng = random.Random(n)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime_int(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m, rng)
        stack.append(d)
        stack.append(m // d)
    return out


def _sqrt_minus_one_mod(p: int) -> int:
    """A square root of -1 mod p, for prime p = 1 mod 4."""
    rng = random.Random(p)
    e = (p - 1) // 4
    while True:
        t = pow(rng.randrange(2, p - 1), e, p)
        if t * t % p == p - 1:
            return t


# ---------------------------------------------------------------------------
# prime ideals


@dataclass(frozen=True)
class PrimeIdeal:
    generator: RingElement
    residue_norm: int

    def __post_init__(self):
        g = self.generator
        if canonical_associate(g) != g:
            raise ValueError("prime ideal generator must be canonical")
        if not is_prime_element(g):
            raise ValueError(f"{g} is not prime in {g.ring}")
        if norm(g) != self.residue_norm:
            raise ValueError("residue_norm must equal norm(generator)")

    @property
    def ring(self) -> str:
        return self.generator.ring

    def __str__(self):
        return str(self.generator)


def prime_ideal(g: RingElement) -> PrimeIdeal:
    g = canonical_associate(g)
    return PrimeIdeal(g, norm(g))


def is_prime_element(g: RingElement) -> bool:
    if g.ring == RING_Z:
        return is_prime_int(abs(g.a))
    n = norm(g)
    if is_prime_int(n):
        return True
    # inert rational primes p = 3 mod 4 have norm p^2
    r = math.isqrt(n)
    return r * r == n and r % 4 == 3 and is_prime_int(r) and divides(g, gel(r) * one(RING_ZI))


def gaussian_prime_above(p: int) -> RingElement:
    """A canonical Gaussian prime above the rational prime p (p = 3 mod 4 inert)."""
    if p == 2:
        return canonical_associate(gel(1, 1))
    if p % 4 == 3:
        return gel(p)
    t = _sqrt_minus_one_mod(p)
    return canonical_associate(euclid_gcd(gel(p), gel(t, 1)))


def valuation(x: RingElement | None, m: PrimeIdeal) -> int | float:
    """Largest e with generator^e dividing x; inf for the zero ideal (x None or 0)."""
    if x is None or not x:
        return math.inf
    if x.ring != m.ring:
        raise RingMismatchError("element and prime ideal live in different rings")
    e = 0
    g = m.generator
    while True:
        q, r = euclid_divmod(x, g)
        if r:
            return e
        x = q
        e += 1


def factor_ideal(x: RingElement) -> list[tuple[PrimeIdeal, int]]:
    """Factor the principal ideal (x) into prime ideals, x != 0.

    Sorted by (residue norm, generator components) for reproducibility.
    """
    if not x:
        raise ZeroIdealError("the zero ideal has no factorization")
    factors: list[tuple[PrimeIdeal, int]] = []
    if x.ring == RING_Z:
        for p, e in sorted(factor_int(abs(x.a)).items()):
            factors.append((prime_ideal(zel(p)), e))
        return factors
    for p, e in sorted(factor_int(norm(x)).items()):
        if p == 2:
            factors.append((prime_ideal(gel(1, 1)), e))
        elif p % 4 == 3:
            factors.append((prime_ideal(gel(p)), e // 2))
        else:
            pi = gaussian_prime_above(p)
            e1 = valuation(x, prime_ideal(pi))
            e2 = e - e1
            if e1:
                factors.append((prime_ideal(pi), int(e1)))
            if e2:
                factors.append((prime_ideal(pi.conj()), e2))
    factors.sort(key=lambda fe: (fe[0].residue_norm, fe[0].generator.a, fe[0].generator.b))
    return factors


def primes_with_norm_at_most(ring: str, bound: float) -> list[PrimeIdeal]:
    """All prime ideals of the ring with residue norm <= bound."""
    out: list[PrimeIdeal] = []
    if bound < 2:
        return out
    limit = int(bound)
    sieve = [True] * (limit + 1)
    for n in range(2, limit + 1):
        if not sieve[n]:
            continue
        for k in range(n * n, limit + 1, n):
            sieve[k] = False
        if ring == RING_Z:
            out.append(prime_ideal(zel(n)))
        else:
            if n == 2:
                out.append(prime_ideal(gel(1, 1)))
            elif n % 4 == 1:
                pi = gaussian_prime_above(n)
                out.append(prime_ideal(pi))
                out.append(prime_ideal(canonical_associate(pi.conj())))
            elif n * n <= limit:
                out.append(prime_ideal(gel(n)))
    out.sort(key=lambda m: (m.residue_norm, m.generator.a, m.generator.b))
    return out


def as_fraction(x: int) -> Fraction:
    return Fraction(x)
