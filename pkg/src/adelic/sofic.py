"""Finitely generated groups, finite samples of their actions, and
approximation-quality metrics.

A sample is a finite set with one permutation per generator, i.e. a finite
action of the free group on the generator alphabet.  Supported groups are
free abelian groups (tori as finite quotients) and the lamplighter group
(Z/2 wr Z, finite wreath quotients), plus seeded perturbations of any
sample.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

WORD_ENUM_LIMIT = 1_000_000

FREE_ABELIAN = "free_abelian"
LAMPLIGHTER = "lamplighter"

# letters are (generator name, +1 or -1); words are kept freely reduced
Letter = tuple[str, int]
Word = tuple[Letter, ...]


class SampleError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    dimension: int = 1

    def __post_init__(self):
        if self.kind == FREE_ABELIAN:
            if self.dimension < 1:
                raise ValueError("free abelian rank must be >= 1")
        elif self.kind == LAMPLIGHTER:
            pass
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @property
    def generators(self) -> list[str]:
        if self.kind == LAMPLIGHTER:
            return ["a", "b"]
        if self.dimension == 1:
            return ["t"]
        return [f"t{k + 1}" for k in range(self.dimension)]


def reduce_word(letters) -> Word:
    out: list[Letter] = []
    for g, e in letters:
        if e not in (1, -1):
            raise ValueError("letter exponents must be +1 or -1")
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def word_inverse(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def power_word(gen: str, k: int) -> Word:
    e = 1 if k >= 0 else -1
    return tuple((gen, e) for _ in range(abs(k)))


def is_trivial_word(group: GroupSpec, w: Word) -> bool:
    """True iff the word maps to the identity of the group."""
    gens = group.generators
    for g, _ in w:
        if g not in gens:
            raise ValueError(f"unknown generator {g!r}")
    if group.kind == FREE_ABELIAN:
        sums = {g: 0 for g in gens}
        for g, e in w:
            sums[g] += e
        return all(v == 0 for v in sums.values())
    # lamplighter normal form: cursor position plus toggled lamp positions
    pos = 0
    lamps: set[int] = set()
    for g, e in w:
        if g == "a":
            pos += e
        else:
            lamps.symmetric_difference_update({pos})
    return pos == 0 and not lamps


@dataclass(frozen=True)
class SoficSample:
    size: int
    perms: dict[str, tuple[int, ...]]
    family_label: str = ""
    index_param: tuple[int, ...] = ()
    _inverses: dict[str, tuple[int, ...]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self):
        for g, perm in self.perms.items():
            if sorted(perm) != list(range(self.size)):
                raise SampleError(f"generator {g!r} map is not a bijection")
            inv = [0] * self.size
            for x, y in enumerate(perm):
                inv[y] = x
            self._inverses[g] = tuple(inv)

    @property
    def generators(self) -> list[str]:
        return list(self.perms)

    def step(self, x: int, g: str, e: int) -> int:
        return self.perms[g][x] if e == 1 else self._inverses[g][x]


def act(sample: SoficSample, x: int, w: Word) -> int:
    """Right action x . w, applying letters left to right."""
    if not 0 <= x < sample.size:
        raise SampleError(f"point {x} out of range")
    for g, e in w:
        if g not in sample.perms:
            raise SampleError(f"unknown generator {g!r}")
        x = sample.step(x, g, e)
    return x


# ---------------------------------------------------------------------------
# sample families


def torus_sample(sizes: list[int], label: str = "torus") -> SoficSample:
    if any(n <= 0 for n in sizes):
        raise SampleError("torus sizes must be positive")
    total = 1
    for n in sizes:
        total *= n
    d = len(sizes)
    names = ["t"] if d == 1 else [f"t{k + 1}" for k in range(d)]
    # row-major index of (c_1, ..., c_d)
    strides = [1] * d
    for k in range(d - 2, -1, -1):
        strides[k] = strides[k + 1] * sizes[k + 1]
    perms = {}
    for k, name in enumerate(names):
        perm = []
        for x in range(total):
            c = (x // strides[k]) % sizes[k]
            perm.append(x + strides[k] * ((c + 1) % sizes[k] - c))
        perms[name] = tuple(perm)
    return SoficSample(total, perms, family_label=label, index_param=tuple(sizes))


def wreath_quotient_sample(m: int, label: str = "wreath") -> SoficSample:
    """The finite group (Z/2)^m x| Z/m acted on by right multiplication of
    the lamplighter generator images (a = shift, b = lamp toggle)."""
    if m <= 0:
        raise SampleError("wreath quotient parameter must be positive")
    elements = [
        (bits, k) for bits in itertools.product((0, 1), repeat=m) for k in range(m)
    ]
    index = {el: i for i, el in enumerate(elements)}

    def mul(x, y):
        (f1, k1), (f2, k2) = x, y
        # (f1, k1)(f2, k2) = (f1 + k1.f2, k1 + k2), with k.f the cyclic shift
        shifted = tuple(f2[(j - k1) % m] for j in range(m))
        return (tuple(u ^ v for u, v in zip(f1, shifted)), (k1 + k2) % m)

    img_a = (tuple(0 for _ in range(m)), 1 % m)
    img_b = (tuple(1 if j == 0 else 0 for j in range(m)), 0)
    perms = {
        "a": tuple(index[mul(el, img_a)] for el in elements),
        "b": tuple(index[mul(el, img_b)] for el in elements),
    }
    return SoficSample(len(elements), perms, family_label=label, index_param=(m,))


def perturbed_sample(
    base: SoficSample, fraction: float, seed: int, label: str = "perturbed"
) -> SoficSample:
    """Rewire a subset of each generator's permutation, seeded.

    The subset has floor(fraction * size) points; their images are cycled by
    a random nonzero rotation so that any positive fraction genuinely
    perturbs (a size-1 subset is left alone, as only the identity permutes
    it).  fraction = 0 returns the base sample unchanged.
    """
    if not 0 <= fraction <= 1:
        raise SampleError("perturbation fraction must lie in [0, 1]")
    if fraction == 0:
        return SoficSample(
            base.size, dict(base.perms), family_label=label, index_param=base.index_param
        )
    rng = random.Random(seed)
    k = int(fraction * base.size)
    if k < 2:
        k = min(base.size, 2)
    perms = {}
    for g in sorted(base.perms):
        perm = list(base.perms[g])
        subset = sorted(rng.sample(range(base.size), k))
        images = [perm[x] for x in subset]
        shift = rng.randrange(1, k) if k > 1 else 0
        for pos, x in enumerate(subset):
            perm[x] = images[(pos + shift) % k]
        perms[g] = tuple(perm)
    return SoficSample(base.size, perms, family_label=label, index_param=base.index_param)


def build_sample(group: GroupSpec, family: str, **params) -> SoficSample:
    if family == "torus":
        if group.kind != FREE_ABELIAN:
            raise SampleError("torus families require a free abelian group")
        sizes = params["sizes"]
        if len(sizes) != group.dimension:
            raise SampleError("torus needs one size per free abelian generator")
        return torus_sample(sizes, label=params.get("label", "torus"))
    if family == "wreath":
        if group.kind != LAMPLIGHTER:
            raise SampleError("wreath quotients require the lamplighter group")
        return wreath_quotient_sample(params["m"], label=params.get("label", "wreath"))
    if family == "perturbed":
        return perturbed_sample(
            params["base"],
            params["epsilon"],
            params["seed"],
            label=params.get("label", "perturbed"),
        )
    raise SampleError(f"unknown sample family {family!r}")


# ---------------------------------------------------------------------------
# quality metrics


def enumerate_ball(generators: list[str], r: int):
    """All freely reduced words of length <= r (including the empty word)."""
    letters = [(g, e) for g in generators for e in (1, -1)]
    count, layer = 1, len(letters)
    for _ in range(r):
        count += layer
        layer *= len(letters) - 1
    if count > WORD_ENUM_LIMIT:
        raise SampleError(f"ball enumeration of {count} words refused (limit {WORD_ENUM_LIMIT})")

    words: list[Word] = [()]
    frontier: list[Word] = [()]
    for _ in range(r):
        nxt = []
        for w in frontier:
            for g, e in letters:
                if w and w[-1] == (g, -e):
                    continue
                nxt.append(w + ((g, e),))
        words.extend(nxt)
        frontier = nxt
    return words


def sofic_quality(sample: SoficSample, group: GroupSpec, r: int) -> Fraction:
    """Fraction of points on which the action agrees with the group out to
    word length r: x . w = x exactly for the words trivial in the group."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    words = enumerate_ball(group.generators, r)
    # BFS order guarantees every proper prefix precedes its extensions, so
    # endpoints can be computed one letter at a time
    index = {w: i for i, w in enumerate(words)}
    steps = [(index[w[:-1]], w[-1]) for w in words[1:]]
    trivial = [is_trivial_word(group, w) for w in words]
    good = 0
    for x in range(sample.size):
        ends = [x]
        ok = True
        for (pi, (g, e)), triv in zip(steps, trivial[1:]):
            y = sample.step(ends[pi], g, e)
            ends.append(y)
            if (y == x) != triv:
                ok = False
                break
        if ok:
            good += 1
    return Fraction(good, sample.size)


def _as_tuples(points) -> set[tuple[int, ...]]:
    out = set()
    for p in points:
        out.add((p,) if isinstance(p, int) else tuple(p))
    return out


def _shift(g, e):
    return tuple(x + y for x, y in zip(g, e))


def folner_boundary_ratio(f_set, e_set) -> Fraction:
    """|boundary of F with respect to E| / |F| in Z^d.

    The boundary is the set of g for which g+E meets both F and its
    complement.
    """
    F = _as_tuples(f_set)
    if not F:
        raise ValueError("F must be nonempty")
    E = _as_tuples(e_set)
    candidates = {_shift(f, tuple(-x for x in e)) for f in F for e in E}
    boundary = 0
    for g in candidates:
        translated = {_shift(g, e) for e in E}
        if translated & F and translated - F:
            boundary += 1
    return Fraction(boundary, len(F))


def invariance_fraction(x_set, f_set) -> Fraction:
    """Fraction of g in X with g+F entirely inside X."""
    X = _as_tuples(x_set)
    if not X:
        raise ValueError("X must be nonempty")
    F = _as_tuples(f_set)
    good = sum(1 for g in X if all(_shift(g, f) in X for f in F))
    return Fraction(good, len(X))
