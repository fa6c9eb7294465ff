"""Group-ring elements over Z and Z[i] with free-group convolution, and the
operator matrices they induce on finite samples."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .matrices import ExactMatrix, rank_over_fraction_field
from .rings import RING_Z, RING_ZI, RingElement, ceil_element, norm, parse_element, zero
from .sofic import SoficSample, Word, act, power_word, reduce_word, word_inverse


@dataclass(frozen=True)
class GroupRingElement:
    ring: str
    terms: tuple[tuple[Word, RingElement], ...]  # sorted, no zero coefficients

    @staticmethod
    def from_dict(ring: str, terms: dict[Word, RingElement]) -> "GroupRingElement":
        clean = {w: c for w, c in terms.items() if c}
        return GroupRingElement(ring, tuple(sorted(clean.items())))

    def as_dict(self) -> dict[Word, RingElement]:
        return dict(self.terms)

    def coefficient(self, w: Word) -> RingElement:
        for word, c in self.terms:
            if word == w:
                return c
        return zero(self.ring)

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        out = self.as_dict()
        for w, c in other.terms:
            s = out.get(w, zero(self.ring)) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return GroupRingElement.from_dict(self.ring, out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms:
            word = "*".join(f"{g}^{e}" if e != 1 else g for g, e in w) or "1"
            parts.append(f"({c})*{word}")
        return " + ".join(parts)


def constant(ring: str, c: RingElement) -> GroupRingElement:
    return GroupRingElement.from_dict(ring, {(): c})


def generator_element(ring: str, gen: str, exp: int = 1) -> GroupRingElement:
    return GroupRingElement.from_dict(
        ring, {power_word(gen, exp): RingElement(ring, 1)}
    )


def adjoint(a: GroupRingElement) -> GroupRingElement:
    """Each term (w, c) becomes (w^-1, conj(c)); over Z conjugation is trivial."""
    return GroupRingElement.from_dict(
        a.ring, {word_inverse(w): c.conj() for w, c in a.terms}
    )


def multiply(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    out: dict[Word, RingElement] = {}
    for w1, c1 in a.terms:
        for w2, c2 in b.terms:
            w = reduce_word(w1 + w2)
            c = c1 * c2
            s = out.get(w)
            s = c if s is None else s + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
    return GroupRingElement.from_dict(a.ring, out)


def power(a: GroupRingElement, l: int) -> GroupRingElement:
    result = constant(a.ring, RingElement(a.ring, 1))
    for _ in range(l):
        result = multiply(result, a)
    return result


def element_stats(a: GroupRingElement) -> tuple[int, float, float]:
    """(support size, sum of absolute values, sum of coefficient ceilings)."""
    support = len(a.terms)
    abs_sum = sum(abs(complex(c.a, c.b)) for _, c in a.terms)
    ceil_sum = sum(ceil_element(c) for _, c in a.terms)
    return support, float(abs_sum), float(ceil_sum)


def ceil_group_element(a: GroupRingElement) -> float:
    return element_stats(a)[2]


def operator_matrix(a: GroupRingElement, X: SoficSample) -> ExactMatrix:
    """The |X| x |X| matrix of x -> x . a in the point basis.

    Entry (i, j) aggregates the coefficients of every word carrying point i
    to point j.
    """
    n = X.size
    entries = [zero(a.ring) for _ in range(n * n)]
    for w, c in a.terms:
        for i in range(n):
            j = act(X, i, w)
            entries[i * n + j] = entries[i * n + j] + c
    return ExactMatrix(a.ring, n, n, tuple(entries))


def rank_normalized(a: GroupRingElement, X: SoficSample) -> Fraction:
    """dim im / |X| of the induced operator over the fraction field."""
    if X.size == 0:
        raise ValueError("empty sample")
    return Fraction(rank_over_fraction_field(operator_matrix(a, X)), X.size)


# ---------------------------------------------------------------------------
# parsing

_TERM_RE = re.compile(
    r"""
    (?P<coef>[+-]?\d+)?          # optional integer coefficient
    \s*\*?\s*
    (?:(?P<gen>[A-Za-z]\w*)      # optional generator name
       (?:\^(?P<exp>-?\d+))?)?   # optional exponent
    """,
    re.VERBOSE,
)


def parse_shorthand(ring: str, text: str) -> GroupRingElement:
    """Parse expressions like "2 - t - t^-1" or "1 + 3*t^2"."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty element expression")
    # split into signed terms
    terms: dict[Word, RingElement] = {}
    pos = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        pos = 1
    while pos <= len(s) - 1 or pos == 0:
        nxt = pos
        while nxt < len(s) and s[nxt] not in "+-":
            # allow the exponent's own sign after '^'
            nxt += 1
            if nxt < len(s) and s[nxt - 1] == "^" and s[nxt] in "+-":
                nxt += 1
        term = s[pos:nxt]
        m = _TERM_RE.fullmatch(term)
        if not m or (m.group("coef") is None and m.group("gen") is None):
            raise ValueError(f"cannot parse term {term!r} in {text!r}")
        coef = int(m.group("coef")) if m.group("coef") is not None else 1
        coef *= sign
        if m.group("gen") is None:
            word: Word = ()
        else:
            exp = int(m.group("exp")) if m.group("exp") is not None else 1
            word = power_word(m.group("gen"), exp)
        c = RingElement(ring, coef)
        prev = terms.get(word, zero(ring))
        total = prev + c
        if total:
            terms[word] = total
        else:
            terms.pop(word, None)
        if nxt >= len(s):
            break
        sign = -1 if s[nxt] == "-" else 1
        pos = nxt + 1
    return GroupRingElement.from_dict(ring, terms)


def parse_term_list(ring: str, items: list) -> GroupRingElement:
    """Parse the term-list form: entries [gen, exp, coef] with gen = "" for
    the identity word, or [[[gen, exp], ...], coef] for longer words."""
    terms: dict[Word, RingElement] = {}
    for item in items:
        if len(item) == 3 and isinstance(item[0], str):
            gen, exp, coef = item
            word = power_word(gen, int(exp)) if gen else ()
        elif len(item) == 2:
            pairs, coef = item
            word = reduce_word([(g, 1 if int(e) >= 0 else -1) for g, e in _expand(pairs)])
        else:
            raise ValueError(f"malformed term {item!r}")
        c = parse_element(ring, str(coef))
        prev = terms.get(word, zero(ring))
        total = prev + c
        if total:
            terms[word] = total
        else:
            terms.pop(word, None)
    return GroupRingElement.from_dict(ring, terms)


def _expand(pairs):
    for g, e in pairs:
        e = int(e)
        step = 1 if e >= 0 else -1
        for _ in range(abs(e)):
            yield g, step


def parse_group_ring(ring: str, spec) -> GroupRingElement:
    if isinstance(spec, str):
        return parse_shorthand(ring, spec)
    return parse_term_list(ring, spec)


def norm_one(a: GroupRingElement) -> bool:
    return all(norm(c) == 1 for _, c in a.terms)
