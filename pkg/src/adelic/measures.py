"""Ideal-valued measures of cokernel decompositions.

The cokernel of the operator matrix of a group-ring element on a finite
sample decomposes, via the Smith normal form, into trivial summands, a
divisibility chain of torsion quotients, and a free part.  The induced
probability measure on the space of ideals is computed exactly, together
with its localizations, interval masses (directly and through kernel
lengths), pointwise masses through interval inclusion-exclusion, the
torsion covolume det+, and the uniform tail bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .groupring import GroupRingElement, ceil_group_element, operator_matrix
from .matrices import (
    ExactMatrix,
    kernel_length_mod_power,
    smith_normal_form,
)
from .rings import (
    FIELD_DEGREE,
    PrimeIdeal,
    RingElement,
    ZeroIdealError,
    canonical_associate,
    divides,
    factor_ideal,
    norm,
    one,
    primes_with_norm_at_most,
    valuation,
)
from .sofic import SoficSample

LOG_SLACK = 1e-9
MASS_SLACK = 1e-12
MAX_INTERVAL_PRIMES = 4


@dataclass(frozen=True)
class Ideal:
    """Zero ideal (generator None) or a principal ideal with canonical generator."""

    ring: str
    generator: RingElement | None

    def __post_init__(self):
        g = self.generator
        if g is not None:
            if not g:
                raise ValueError("use generator None for the zero ideal")
            if g.ring != self.ring:
                raise ValueError("generator ring mismatch")
            if canonical_associate(g) != g:
                raise ValueError("ideal generator must be canonical")

    @property
    def is_zero(self) -> bool:
        return self.generator is None

    @property
    def is_unit(self) -> bool:
        return self.generator is not None and self.generator.is_unit()

    def ideal_norm(self) -> int | float:
        if self.is_zero:
            return math.inf
        return norm(self.generator)

    def contains(self, other: "Ideal") -> bool:
        # J subseteq I iff gen(I) | gen(J); the zero ideal lies in every ideal
        if other.is_zero:
            return True
        if self.is_zero:
            return False
        return divides(self.generator, other.generator)

    def __str__(self):
        return "0" if self.is_zero else str(self.generator)


def ideal_of(x: RingElement) -> Ideal:
    if not x:
        return Ideal(x.ring, None)
    return Ideal(x.ring, canonical_associate(x))


def zero_ideal(ring: str) -> Ideal:
    return Ideal(ring, None)


def unit_ideal(ring: str) -> Ideal:
    return Ideal(ring, one(ring))


def ideal_product(ideals) -> Ideal:
    ideals = list(ideals)
    ring = ideals[0].ring
    g = one(ring)
    for I in ideals:
        if I.is_zero:
            return zero_ideal(ring)
        g = g * I.generator
    return ideal_of(g)


def prime_power_ideal(m: PrimeIdeal, e: int) -> Ideal:
    g = one(m.ring)
    for _ in range(e):
        g = g * m.generator
    return ideal_of(g)


def ideal_valuation(I: Ideal, m: PrimeIdeal) -> int | float:
    return valuation(I.generator, m)


@dataclass(frozen=True)
class ModuleDecomposition:
    trivial_count: int
    torsion_ideals: tuple[Ideal, ...]  # divisibility chain, I_{k+1} subseteq I_k
    free_rank: int
    total: int

    def __post_init__(self):
        if self.trivial_count + len(self.torsion_ideals) + self.free_rank != self.total:
            raise ValueError("decomposition parts must sum to the total")
        for prev, nxt in zip(self.torsion_ideals, self.torsion_ideals[1:]):
            if not prev.contains(nxt):
                raise ValueError("torsion ideals must form a divisibility chain")


@dataclass(frozen=True)
class IdealMeasure:
    ring: str
    masses: tuple[tuple[Ideal, Fraction], ...]
    total_points: int

    def __post_init__(self):
        total = sum((m for _, m in self.masses), Fraction(0))
        if total != 1:
            raise ValueError("masses must sum to 1 exactly")
        for _, m in self.masses:
            if m <= 0:
                raise ValueError("masses must be positive")
            if self.total_points % m.denominator != 0:
                raise ValueError("mass denominators must divide the sample size")

    def as_dict(self) -> dict[Ideal, Fraction]:
        return dict(self.masses)

    def mass(self, I: Ideal) -> Fraction:
        for J, m in self.masses:
            if J == I:
                return m
        return Fraction(0)

    def support(self) -> list[Ideal]:
        return [I for I, _ in self.masses]


def decompose_cokernel(A: ExactMatrix) -> ModuleDecomposition:
    if A.rows != A.cols:
        raise ValueError("cokernel decomposition requires a square matrix")
    snf = smith_normal_form(A)
    trivial = 0
    torsion = []
    for alpha in snf.divisors:
        if alpha.is_unit():
            trivial += 1
        else:
            torsion.append(ideal_of(alpha))
    return ModuleDecomposition(
        trivial_count=trivial,
        torsion_ideals=tuple(torsion),
        free_rank=snf.free_count,
        total=A.rows,
    )


def measure_from_decomposition(
    dec: ModuleDecomposition, ring: str | None = None
) -> IdealMeasure:
    if dec.total == 0:
        raise ValueError("empty decomposition has no measure")
    if ring is None:
        if not dec.torsion_ideals:
            raise ValueError("ring tag needed for torsion-free decompositions")
        ring = dec.torsion_ideals[0].ring
    masses: dict[Ideal, Fraction] = {}

    def put(I: Ideal, count: int):
        if count:
            masses[I] = masses.get(I, Fraction(0)) + Fraction(count, dec.total)

    put(unit_ideal(ring), dec.trivial_count)
    for I in dec.torsion_ideals:
        put(I, 1)
    put(zero_ideal(ring), dec.free_rank)
    ordered = sorted(masses.items(), key=lambda im: (im[0].is_zero, str(im[0])))
    return IdealMeasure(ring, tuple(ordered), dec.total)


def measure_of(a: GroupRingElement, X: SoficSample) -> IdealMeasure:
    A = operator_matrix(a, X)
    return measure_from_decomposition(decompose_cokernel(A), ring=a.ring)


# ---------------------------------------------------------------------------
# localization and intervals


def localize_measure(nu: IdealMeasure, m: PrimeIdeal) -> dict[int | float, Fraction]:
    """Pushforward along the valuation at m; the zero ideal maps to infinity."""
    out: dict[int | float, Fraction] = {}
    for I, mass in nu.masses:
        j = ideal_valuation(I, m)
        key = j if j is math.inf else int(j)
        out[key] = out.get(key, Fraction(0)) + mass
    return out


def interval_mass(nu: IdealMeasure, I: Ideal) -> Fraction:
    """Mass of the interval of ideals contained in I (zero ideal included)."""
    if I.is_zero:
        raise ZeroIdealError("the zero-ideal interval is the point mass at 0")
    return sum((mass for J, mass in nu.masses if I.contains(J)), Fraction(0))


def kernel_length_identity(
    a: GroupRingElement, X: SoficSample, I: Ideal
) -> tuple[Fraction, Fraction]:
    """Both sides of the kernel-length identity for a proper nonzero ideal.

    Left: normalized length of the kernel modulo I, summed over the prime
    powers of I.  Right: the measure-weighted sum of min valuations.  Equal
    on every instance.
    """
    if I.is_zero or I.is_unit:
        raise ValueError("the identity needs a proper nonzero ideal")
    A = operator_matrix(a, X)
    nu = measure_of(a, X)
    factors = factor_ideal(I.generator)
    lhs = Fraction(0)
    for m, e in factors:
        lhs += Fraction(kernel_length_mod_power(A, m, e), X.size)
    rhs = Fraction(0)
    for J, mass in nu.masses:
        s = 0
        for m, e in factors:
            vj = ideal_valuation(J, m)
            s += e if vj is math.inf else min(e, int(vj))
        rhs += mass * s
    return lhs, rhs


def _single_prime_interval_via_lengths(
    A: ExactMatrix, size: int, m: PrimeIdeal, e: int
) -> Fraction:
    li = kernel_length_mod_power(A, m, e)
    lprev = kernel_length_mod_power(A, m, e - 1) if e > 1 else 0
    return Fraction(li - lprev, size)


def interval_mass_via_lengths(a: GroupRingElement, X: SoficSample, I: Ideal) -> Fraction:
    """Interval mass computed from kernel lengths alone.

    Single prime powers use the difference of consecutive kernel lengths.
    For several primes the constraints cut tail segments of the canonical
    divisibility chain carrying the measure, so the interval mass is the
    minimum of the single-prime interval masses.
    """
    if I.is_zero or I.is_unit:
        raise ValueError("interval masses need a proper nonzero ideal")
    factors = factor_ideal(I.generator)
    if len(factors) > MAX_INTERVAL_PRIMES:
        raise ValueError(f"interval recursion limited to {MAX_INTERVAL_PRIMES} primes")
    A = operator_matrix(a, X)
    per_prime = [
        _single_prime_interval_via_lengths(A, X.size, m, e) for m, e in factors
    ]
    return min(per_prime)


def pointwise_mass_via_intervals(
    a: GroupRingElement, X: SoficSample, I: Ideal, lam: float
) -> Fraction:
    """Mass at I recovered from interval masses, truncated at norm lam.

    Subtracts, by inclusion-exclusion over the primes m with N(mI) <= lam,
    the mass of the union of the subintervals below I.  Exact once lam
    exceeds the largest support norm times N(I).
    """
    if I.is_zero:
        raise ZeroIdealError("pointwise mass at the zero ideal is read directly")
    nu = measure_of(a, X)
    c = ceil_group_element(a) ** FIELD_DEGREE[a.ring]
    if c <= 1:
        # det+ <= c^|X| <= 1 forces trivial torsion; the direct mass is exact
        return nu.mass(I)
    n_i = norm(I.generator)
    primes = primes_with_norm_at_most(a.ring, lam / n_i)
    total = interval_mass(nu, I)
    if not primes:
        return total
    # the zero ideal sits in every interval; split it off so the
    # inclusion-exclusion only ranges over primes whose subinterval carries
    # any remaining mass
    zero_mass = nu.mass(zero_ideal(a.ring))

    def reduced_interval(J: Ideal) -> Fraction:
        return interval_mass(nu, J) - zero_mass

    active = [m for m in primes if reduced_interval(ideal_product([prime_power_ideal(m, 1), I]))]
    union = zero_mass
    for j in range(1, len(active) + 1):
        sign = 1 if j % 2 == 1 else -1
        for sel in combinations(active, j):
            J = ideal_product([prime_power_ideal(m, 1) for m in sel] + [I])
            union += sign * reduced_interval(J)
    return total - union


# ---------------------------------------------------------------------------
# det+ and bounds


def torsion_det_plus(A: ExactMatrix) -> int:
    """Cardinality of the torsion part of the cokernel: product of the norms
    of the nonunit nonzero Smith divisors (1 when torsion-free)."""
    if A.rows != A.cols:
        raise ValueError("det+ requires a square matrix")
    out = 1
    for alpha in smith_normal_form(A).divisors:
        if not alpha.is_unit():
            out *= norm(alpha)
    return out


def detplus_bound_check(
    a: GroupRingElement, X: SoficSample
) -> tuple[int, float, bool]:
    """det+ of the induced operator against ceil(a)^(|X| deg)."""
    if not a:
        raise ValueError("the bound is vacuous for a = 0")
    det = torsion_det_plus(operator_matrix(a, X))
    ceil_a = ceil_group_element(a)
    deg = FIELD_DEGREE[a.ring]
    bound_log = X.size * deg * math.log(ceil_a) if ceil_a > 0 else -math.inf
    holds = math.log(det) <= bound_log * (1 + LOG_SLACK) + MASS_SLACK
    return det, ceil_a ** (X.size * deg), holds


def tail_mass_check(
    a: GroupRingElement, X: SoficSample, lam: float
) -> tuple[Fraction, float, bool]:
    """Total mass on proper nonzero ideals of norm > lam, against 1/log_c(lam)."""
    if lam <= 1:
        raise ValueError("lam must exceed 1")
    nu = measure_of(a, X)
    tail = sum(
        (
            mass
            for I, mass in nu.masses
            if not I.is_zero and not I.is_unit and I.ideal_norm() > lam
        ),
        Fraction(0),
    )
    c = ceil_group_element(a) ** FIELD_DEGREE[a.ring]
    if c <= 1:
        return tail, 0.0, tail == 0
    bound = math.log(c) / math.log(lam)
    return tail, bound, float(tail) <= bound + MASS_SLACK


def measure_distance(nu1: IdealMeasure, nu2: IdealMeasure) -> Fraction:
    """Sum of absolute pointwise differences (twice the total variation)."""
    if nu1.ring != nu2.ring:
        raise ValueError("ring mismatch")
    d1, d2 = nu1.as_dict(), nu2.as_dict()
    keys = set(d1) | set(d2)
    return sum(
        (abs(d1.get(k, Fraction(0)) - d2.get(k, Fraction(0))) for k in keys),
        Fraction(0),
    )


def serialize_measure(nu: IdealMeasure) -> str:
    lines = ["ideal,mass_num,mass_den"]
    for I, mass in nu.masses:
        lines.append(f"{I},{mass.numerator},{mass.denominator}")
    return "\n".join(lines)
