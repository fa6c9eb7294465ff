"""Dense exact matrices over Z and Z[i].

Smith normal form with accumulated unimodular factors, a gcd-of-minors
oracle for the elementary divisors, fraction-free rank and determinant,
characteristic polynomials, trace powers, the matrix ceiling, and kernel
lengths modulo prime powers (structural and brute-force).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .rings import (
    RING_Z,
    RING_ZI,
    PrimeIdeal,
    RingElement,
    canonical_associate,
    canonical_unit,
    ceil_element,
    divides,
    euclid_divmod,
    euclid_gcd,
    exact_div,
    gel,
    norm,
    one,
    valuation,
    zel,
    zero,
)

MINOR_ORACLE_LIMIT = 8
BRUTE_FORCE_LIMIT = 300_000


@dataclass(frozen=True)
class ExactMatrix:
    ring: str
    rows: int
    cols: int
    entries: tuple[RingElement, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")
        for x in self.entries:
            if x.ring != self.ring:
                raise ValueError("mixed-ring matrix entries")

    def get(self, i: int, j: int) -> RingElement:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[RingElement, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_lists(self) -> list[list[RingElement]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows or self.ring != other.ring:
            raise ValueError("incompatible shapes or rings")
        out = []
        ocols = [[other.get(k, j) for k in range(other.rows)] for j in range(other.cols)]
        for i in range(self.rows):
            r = self.row(i)
            for col in ocols:
                s = zero(self.ring)
                for x, y in zip(r, col):
                    if x and y:
                        s = s + x * y
                out.append(s)
        return ExactMatrix(self.ring, self.rows, other.cols, tuple(out))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols, self.ring) != (other.rows, other.cols, other.ring):
            raise ValueError("incompatible shapes or rings")
        return ExactMatrix(
            self.ring, self.rows, self.cols,
            tuple(x + y for x, y in zip(self.entries, other.entries)),
        )

    def conj_transpose(self) -> "ExactMatrix":
        out = [self.get(i, j).conj() for j in range(self.cols) for i in range(self.rows)]
        return ExactMatrix(self.ring, self.cols, self.rows, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.entries)


def matrix_from_rows(ring: str, rows: list[list[RingElement]]) -> ExactMatrix:
    r = len(rows)
    c = len(rows[0]) if rows else 0
    return ExactMatrix(ring, r, c, tuple(x for row in rows for x in row))


def matrix_from_ints(ring: str, rows: list[list[int]]) -> ExactMatrix:
    return matrix_from_rows(ring, [[RingElement(ring, n) for n in row] for row in rows])


def identity(ring: str, n: int) -> ExactMatrix:
    return ExactMatrix(
        ring, n, n,
        tuple(one(ring) if i == j else zero(ring) for i in range(n) for j in range(n)),
    )


def zero_matrix(ring: str, rows: int, cols: int) -> ExactMatrix:
    return ExactMatrix(ring, rows, cols, tuple(zero(ring) for _ in range(rows * cols)))


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    P: ExactMatrix
    D: ExactMatrix
    Q: ExactMatrix
    divisors: tuple[RingElement, ...] = field(default=())
    free_count: int = 0


def _min_norm_pivot(d, t, rows, cols):
    best = None
    for i in range(t, rows):
        for j in range(t, cols):
            x = d[i][j]
            if x:
                n = norm(x)
                if best is None or n < best[0]:
                    best = (n, i, j)
    return None if best is None else (best[1], best[2])


def smith_normal_form(A: ExactMatrix) -> SmithForm:
    """A = P*D*Q with P, Q unimodular and D diagonal with divisibility chain.

    Pivots are chosen with minimal norm (ties by lowest row, col) to limit
    coefficient growth.
    """
    ring = A.ring
    rows, cols = A.rows, A.cols
    d = A.to_lists()
    p = identity(ring, rows).to_lists()
    q = identity(ring, cols).to_lists()

    # maintained invariant: A == P * D * Q

    def row_add(i, j, f):
        # D row i += f * D row j;  P col j -= f * P col i
        for c in range(cols):
            if d[j][c]:
                d[i][c] = d[i][c] + f * d[j][c]
        for r in range(rows):
            if p[r][i]:
                p[r][j] = p[r][j] - f * p[r][i]

    def col_add(j, i, f):
        # D col j += f * D col i;  Q row i -= f * Q row j
        for r in range(rows):
            if d[r][i]:
                d[r][j] = d[r][j] + f * d[r][i]
        for c in range(cols):
            if q[j][c]:
                q[i][c] = q[i][c] - f * q[j][c]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        for r in range(rows):
            p[r][i], p[r][j] = p[r][j], p[r][i]

    def col_swap(i, j):
        for r in range(rows):
            d[r][i], d[r][j] = d[r][j], d[r][i]
        q[i], q[j] = q[j], q[i]

    def row_scale(i, u):
        uinv = u.conj() if ring == RING_ZI else u
        for c in range(cols):
            d[i][c] = u * d[i][c]
        for r in range(rows):
            p[r][i] = p[r][i] * uinv

    t = 0
    limit = min(rows, cols)
    while t < limit:
        piv = _min_norm_pivot(d, t, rows, cols)
        if piv is None:
            break
        i0, j0 = piv
        if i0 != t:
            row_swap(t, i0)
        if j0 != t:
            col_swap(t, j0)
        # clear column t and row t by Euclidean reduction
        dirty = False
        for i in range(t + 1, rows):
            if d[i][t]:
                qq, r = euclid_divmod(d[i][t], d[t][t])
                row_add(i, t, -qq)
                if r:
                    dirty = True
        for j in range(t + 1, cols):
            if d[t][j]:
                qq, r = euclid_divmod(d[t][j], d[t][t])
                col_add(j, t, -qq)
                if r:
                    dirty = True
        if dirty:
            continue
        # pivot must divide everything that remains
        offender = None
        pivot = d[t][t]
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if d[i][j] and not divides(pivot, d[i][j]):
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_add(t, offender, one(ring))
            continue
        u = canonical_unit(pivot)
        if u != one(ring):
            row_scale(t, u)
        t += 1

    divisors = tuple(d[k][k] for k in range(t))
    P = matrix_from_rows(ring, p)
    D = matrix_from_rows(ring, d)
    Q = matrix_from_rows(ring, q)
    return SmithForm(P=P, D=D, Q=Q, divisors=divisors, free_count=limit - t)


# ---------------------------------------------------------------------------
# fraction-free determinant / rank (Bareiss)


def determinant(A: ExactMatrix) -> RingElement:
    if A.rows != A.cols:
        raise ValueError("determinant requires a square matrix")
    n = A.rows
    if n == 0:
        return one(A.ring)
    m = A.to_lists()
    sign = 1
    prev = one(A.ring)
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return zero(A.ring)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = exact_div(num, prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def rank_over_fraction_field(A: ExactMatrix) -> int:
    """Rank over Q (or Q(i)) by fraction-free elimination."""
    m = A.to_lists()
    rows, cols = A.rows, A.cols
    rank = 0
    prev = one(A.ring)
    for col in range(cols):
        piv = None
        for i in range(rank, rows):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, rows):
            for j in range(col + 1, cols):
                num = m[i][j] * m[rank][col] - m[i][col] * m[rank][j]
                m[i][j] = exact_div(num, prev)
            m[i][col] = zero(A.ring)
        prev = m[rank][col]
        rank += 1
        if rank == rows:
            break
    return rank


# ---------------------------------------------------------------------------
# gcd-of-minors oracle


def gcd_minor_divisors(A: ExactMatrix) -> list[RingElement]:
    """Elementary divisors via d_k = gcd of all k x k minors, alpha_k = d_k/d_{k-1}.

    Exponential in the matrix size; refused beyond MINOR_ORACLE_LIMIT.
    """
    n = min(A.rows, A.cols)
    if n > MINOR_ORACLE_LIMIT:
        raise ValueError(f"minor oracle limited to size {MINOR_ORACLE_LIMIT}")
    divisors = []
    d_prev = one(A.ring)
    for k in range(1, n + 1):
        g = zero(A.ring)
        for rsel in itertools.combinations(range(A.rows), k):
            for csel in itertools.combinations(range(A.cols), k):
                sub = matrix_from_rows(
                    A.ring, [[A.get(i, j) for j in csel] for i in rsel]
                )
                minor = determinant(sub)
                if minor:
                    g = euclid_gcd(g, minor)
                    if g.is_unit():
                        break
            if g and g.is_unit():
                break
        if not g:
            break
        divisors.append(canonical_associate(exact_div(g, d_prev)))
        d_prev = g
    return divisors


def rank_minors_gcd(A: ExactMatrix) -> RingElement:
    """gcd of all rank-sized minors (generator of the det+ ideal)."""
    t = rank_over_fraction_field(A)
    if t == 0:
        return one(A.ring)
    if min(A.rows, A.cols) > MINOR_ORACLE_LIMIT:
        raise ValueError(f"minor oracle limited to size {MINOR_ORACLE_LIMIT}")
    g = zero(A.ring)
    for rsel in itertools.combinations(range(A.rows), t):
        for csel in itertools.combinations(range(A.cols), t):
            sub = matrix_from_rows(A.ring, [[A.get(i, j) for j in csel] for i in rsel])
            minor = determinant(sub)
            if minor:
                g = euclid_gcd(g, minor)
    return g


# ---------------------------------------------------------------------------
# kernel lengths modulo prime powers


def kernel_length_mod_power(A: ExactMatrix, m: PrimeIdeal, i: int) -> int:
    """Length over O/m^i of the kernel of A on (O/m^i)^k, from Smith divisors."""
    if i <= 0:
        raise ValueError("exponent i must be positive")
    if A.rows != A.cols:
        raise ValueError("kernel length requires a square matrix")
    if A.ring != m.ring:
        raise ValueError("matrix and prime ideal live in different rings")
    snf = smith_normal_form(A)
    total = 0
    for alpha in snf.divisors:
        total += min(int(valuation(alpha, m)), i)
    total += i * snf.free_count
    return total


def _residues_mod(beta: RingElement) -> list[RingElement]:
    """A complete residue system modulo beta (beta != 0)."""
    if beta.ring == RING_Z:
        return [zel(k) for k in range(abs(beta.a))]
    g = math.gcd(abs(beta.a), abs(beta.b))
    n = norm(beta)
    return [gel(x, y) for y in range(g) for x in range(n // g)]


def kernel_length_brute_force(A: ExactMatrix, m: PrimeIdeal, i: int) -> int:
    """Enumerate (O/m^i)^k and count the kernel of A; length recovered from its size."""
    if A.rows != A.cols:
        raise ValueError("kernel length requires a square matrix")
    k = A.rows
    beta = one(m.ring)
    for _ in range(i):
        beta = beta * m.generator
    q = norm(beta)  # = residue_norm ** i
    if q**k > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute-force enumeration limited to {BRUTE_FORCE_LIMIT} vectors")
    if m.ring == RING_Z:
        # same exhaustive enumeration, batched: evaluate A v mod q for every
        # residue vector at once (entries < q <= 125, so int64 is exact)
        M = np.array([[A.get(r, c).a % q for c in range(k)] for r in range(k)], dtype=np.int64)
        vecs = np.stack(np.unravel_index(np.arange(q**k), (q,) * k))
        count = int(((M @ vecs) % q == 0).all(axis=0).sum())
        return _length_from_kernel_size(count, m.residue_norm)
    residues = _residues_mod(beta)
    count = 0
    rows = [A.row(r) for r in range(k)]
    for vec in itertools.product(residues, repeat=k):
        ok = True
        for row in rows:
            s = zero(m.ring)
            for x, v in zip(row, vec):
                if x and v:
                    s = s + x * v
            if s and not divides(beta, s):
                ok = False
                break
        if ok:
            count += 1
    return _length_from_kernel_size(count, m.residue_norm)


def _length_from_kernel_size(count: int, residue_norm: int) -> int:
    # |ker| = residue_norm ** length
    length = round(math.log(count) / math.log(residue_norm)) if count > 1 else 0
    if residue_norm**length != count:
        raise AssertionError("kernel size is not a power of the residue norm")
    return length


# ---------------------------------------------------------------------------
# characteristic polynomial, trace powers, ceiling


def char_poly(A: ExactMatrix) -> list[int]:
    """Monic char poly det(xI - A) over Z, coefficients lowest-degree-first."""
    if A.rows != A.cols:
        raise ValueError("char_poly requires a square matrix")
    if A.ring != RING_Z:
        raise ValueError("char_poly is defined over Z (embed Z[i] matrices first)")
    n = A.rows
    a = [[A.get(i, j).a for j in range(n)] for i in range(n)]
    # Faddeev-LeVerrier; all divisions are exact
    coeffs = [1]  # highest-degree-first, starts with x^n
    M = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M <- A (M + c_{k-1} I)
        c_prev = coeffs[-1]
        B = [row[:] for row in M]
        for i in range(n):
            B[i][i] += c_prev
        M = [
            [sum(a[i][l] * B[l][j] for l in range(n)) for j in range(n)]
            for i in range(n)
        ]
        tr = sum(M[i][i] for i in range(n))
        assert tr % k == 0
        coeffs.append(-tr // k)
    coeffs.reverse()
    return coeffs


def trace_power(A: ExactMatrix, l: int) -> RingElement:
    """Exact tr(A^l); tr(A^0) is the size."""
    if A.rows != A.cols:
        raise ValueError("trace_power requires a square matrix")
    if l < 0:
        raise ValueError("power must be nonnegative")
    if l == 0:
        return RingElement(A.ring, A.rows)
    M = A
    for _ in range(l - 1):
        M = M @ A
    s = zero(A.ring)
    for i in range(A.rows):
        s = s + M.get(i, i)
    return s


def ceil_matrix(A: ExactMatrix) -> float:
    """Max over columns of the column sum of entry ceilings; 1 for the zero matrix."""
    if A.is_zero():
        return 1.0
    best = 0.0
    for j in range(A.cols):
        s = sum(ceil_element(A.get(i, j)) for i in range(A.rows))
        best = max(best, s)
    return best


# ---------------------------------------------------------------------------
# serialization


def matrix_to_csv(A: ExactMatrix) -> str:
    return "\n".join(
        ",".join(str(A.get(i, j)) for j in range(A.cols)) for i in range(A.rows)
    )


def matrix_from_csv(text: str, ring: str | None = None) -> ExactMatrix:
    from .rings import parse_element

    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if ring is None:
        ring = RING_ZI if any("i" in ln for ln in lines) else RING_Z
    rows = [[parse_element(ring, tok) for tok in ln.split(",")] for ln in lines]
    return matrix_from_rows(ring, rows)
