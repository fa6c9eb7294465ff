"""Empirical spectral measures of the positive operators b = a a* on finite
samples, exact moment identities against group-side moments, integrality of
the spectral det+, and the uniform zero-gap bound.

Kernel dimensions and moments are exact (rational ranks and traces);
floating-point eigenvalues are used only for reporting and bound audits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groupring import (
    GroupRingElement,
    adjoint,
    element_stats,
    multiply,
    operator_matrix,
)
from .matrices import ExactMatrix, char_poly, matrix_from_ints, rank_over_fraction_field, trace_power
from .rings import RING_Z, RING_ZI
from .sofic import GroupSpec, SoficSample, is_trivial_word

MAX_MOMENT_POWER = 12
MAX_MOMENT_TERMS = 200_000


@dataclass(frozen=True)
class SpectralSummary:
    size: int
    eigenvalues: tuple[float, ...]
    kernel_dim: int
    moments: tuple[Fraction, ...]
    c_bound: float
    spectral_detplus: int


def positive_part(a: GroupRingElement) -> GroupRingElement:
    return multiply(a, adjoint(a))


def embed_real(B: ExactMatrix) -> ExactMatrix:
    """Real 2k x 2k symmetric representation of a Hermitian Z[i] matrix,
    doubling every eigenvalue multiplicity."""
    k = B.rows
    rows = [[0] * (2 * k) for _ in range(2 * k)]
    for i in range(k):
        for j in range(k):
            x = B.get(i, j)
            rows[i][j] = x.a
            rows[i][j + k] = -x.b
            rows[i + k][j] = x.b
            rows[i + k][j + k] = x.a
    return matrix_from_ints(RING_Z, rows)


def _eigenvalues(B: ExactMatrix) -> list[float]:
    if B.ring == RING_ZI:
        M = np.array(
            [[complex(B.get(i, j).a, B.get(i, j).b) for j in range(B.cols)] for i in range(B.rows)]
        )
    else:
        M = np.array([[B.get(i, j).a for j in range(B.cols)] for i in range(B.rows)], dtype=float)
    return sorted(np.linalg.eigvalsh(M).tolist())


def spectral_det_plus(B: ExactMatrix) -> int:
    """Product of the nonzero eigenvalues, exactly, from the characteristic
    polynomial; a positive integer for operators of the form a a* with
    integral a."""
    if B.rows != B.cols:
        raise ValueError("spectral det+ requires a square matrix")
    if B.rows == 0:
        return 1
    if B.ring == RING_ZI:
        coeffs = char_poly(embed_real(B))
        val = _lowest_nonzero_abs(coeffs)
        root = math.isqrt(val)
        if root * root != val:
            raise ValueError("embedded det+ is not a perfect square; matrix not Hermitian?")
        return root
    return _lowest_nonzero_abs(char_poly(B))


def _lowest_nonzero_abs(coeffs: list[int]) -> int:
    for c in coeffs:
        if c:
            return abs(c)
    raise AssertionError("monic polynomial cannot be zero")


def spectral_summary(a: GroupRingElement, X: SoficSample, L: int) -> SpectralSummary:
    if X.size == 0:
        raise ValueError("empty sample")
    b = positive_part(a)
    B = operator_matrix(b, X)
    kernel_dim = X.size - rank_over_fraction_field(B)
    moments = []
    for l in range(L + 1):
        tr = trace_power(B, l)
        if tr.b != 0:
            raise AssertionError("trace of a Hermitian power must be real")
        moments.append(Fraction(tr.a, X.size))
    eigs = _eigenvalues(B)
    support, abs_sum, _ = element_stats(b)
    return SpectralSummary(
        size=X.size,
        eigenvalues=tuple(eigs),
        kernel_dim=kernel_dim,
        moments=tuple(moments),
        c_bound=support * abs_sum,
        spectral_detplus=spectral_det_plus(B),
    )


def group_moment(group: GroupSpec, a: GroupRingElement, l: int) -> Fraction:
    """Identity coefficient of (a a*)^l evaluated in the group: the exact
    l-th moment of the limiting spectral measure."""
    if l < 0 or l > MAX_MOMENT_POWER:
        raise ValueError(f"moment power limited to {MAX_MOMENT_POWER}")
    if l == 0:
        return Fraction(1)
    b = positive_part(a)
    p = b
    for _ in range(l - 1):
        p = multiply(p, b)
        if len(p.terms) > MAX_MOMENT_TERMS:
            raise ValueError("group-ring expansion too large")
    total_re = 0
    total_im = 0
    for w, c in p.terms:
        if is_trivial_word(group, w):
            total_re += c.a
            total_im += c.b
    if total_im != 0:
        raise AssertionError("Hermitian moment must be real")
    return Fraction(total_re)


def moment_gap(
    group: GroupSpec, a: GroupRingElement, X: SoficSample, l: int
) -> Fraction:
    """|finite moment - group moment|, exact."""
    b = positive_part(a)
    B = operator_matrix(b, X)
    tr = trace_power(B, l)
    if tr.b != 0:
        raise AssertionError("trace of a Hermitian power must be real")
    return abs(Fraction(tr.a, X.size) - group_moment(group, a, l))


def luck_zero_bound_check(
    a: GroupRingElement, X: SoficSample, eps: float
) -> tuple[Fraction, float, bool]:
    """Spectral mass of b = a a* strictly inside (0, eps) against the
    uniform bound -log(c)/log(eps), c = S(b)|b|.

    Zero eigenvalues are identified by the exact nullity (the kernel_dim
    smallest magnitudes), never by thresholding.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if a.ring != RING_Z:
        raise ValueError("the integrality argument needs integer coefficients")
    summary = spectral_summary(a, X, 0)
    by_magnitude = sorted(summary.eigenvalues, key=abs)
    nonzero = by_magnitude[summary.kernel_dim :]
    in_gap = sum(1 for lam in nonzero if 0 < lam < eps)
    mass = Fraction(in_gap, X.size)
    c = summary.c_bound
    if c <= 1:
        return mass, 0.0, in_gap == 0
    bound = -math.log(c) / math.log(eps)
    return mass, bound, float(mass) <= bound + 1e-12


def spectral_csv_row(n: int, summary: SpectralSummary) -> str:
    mu_zero = Fraction(summary.kernel_dim, summary.size)
    cells = [str(n), str(summary.size), str(summary.kernel_dim),
             str(mu_zero.numerator), str(mu_zero.denominator)]
    for m in summary.moments[1:]:
        cells.append(str(m.numerator))
        cells.append(str(m.denominator))
    cells.append(str(summary.spectral_detplus))
    cells.append(repr(summary.c_bound))
    return ",".join(cells)
