"""Even coverings, greedy extraction of eps-disjoint subfamilies, and
quasitilings of sofic samples by interval or box tiles.

A family of tiles is eps-disjoint when each placed tile overlaps the union
of the previously placed ones in at most an eps fraction of itself, and it
quasitiles the sample when the union covers at least a (1 - eps) fraction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .sofic import GroupSpec, SoficSample, Word, act, power_word, sofic_quality


class QuasitilingError(ValueError):
    pass


class QualityError(QuasitilingError):
    """Sample quality at the needed radius is below the tiling threshold."""

    def __init__(self, quality: Fraction, needed: float):
        self.quality = quality
        self.needed = needed
        super().__init__(f"sample quality {quality} <= {needed} threshold")


class CoverageError(QuasitilingError):
    """All stages ran but the union missed the coverage target."""

    def __init__(self, coverage: Fraction, system: "TileSystem"):
        self.coverage = coverage
        self.system = system
        super().__init__(f"achieved coverage {coverage} below target")


# ---------------------------------------------------------------------------
# even coverings of an abstract finite ground set


@dataclass(frozen=True)
class Cover:
    ground_size: int
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        if self.ground_size < 0:
            raise ValueError("ground size must be nonnegative")
        for s in self.sets:
            if not s:
                raise ValueError("cover members must be nonempty")
            if not all(0 <= x < self.ground_size for x in s):
                raise ValueError("cover member outside the ground set")


def make_cover(ground_size: int, sets) -> Cover:
    return Cover(ground_size, tuple(frozenset(s) for s in sets))


def even_covering_stats(cover: Cover) -> tuple[int, Fraction]:
    """(multiplicity M, best lambda): M = max point multiplicity and
    lambda = sum |X_i| / (M * ground), the largest lambda for which the
    family is a lambda-even covering."""
    if not cover.sets:
        raise ValueError("empty cover")
    counts = [0] * cover.ground_size
    for s in cover.sets:
        for x in s:
            counts[x] += 1
    mult = max(counts)
    total = sum(len(s) for s in cover.sets)
    return mult, Fraction(total, mult * cover.ground_size)


def find_low_overlap_member(cover: Cover, Y, lam: Fraction) -> int:
    """First index i with |X_i meet Y| / |X_i| <= |Y| / (lam * ground).

    Such an index exists for every lambda-even covering by averaging: the
    multiplicity bound caps the total overlap mass."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    _, best = even_covering_stats(cover)
    if best < lam:
        raise QuasitilingError(f"cover is only {best}-even, not {lam}-even")
    Yset = frozenset(Y)
    bound = Fraction(len(Yset)) / (lam * cover.ground_size)
    for i, s in enumerate(cover.sets):
        if Fraction(len(s & Yset), len(s)) <= bound:
            return i
    raise AssertionError("averaging guarantees a low-overlap member")


def extract_disjoint_subcover(cover: Cover, epsilon, lam) -> list[int]:
    """Greedy eps-disjoint subfamily, scanned in index order: admit X_i when
    it overlaps the union of the already admitted in at most eps * |X_i|
    points.  The result is maximal for this scan order, so its union covers
    at least eps * lam * ground points."""
    epsilon = Fraction(epsilon)
    lam = Fraction(lam)
    if not 0 <= epsilon <= Fraction(1, 2):
        raise ValueError("epsilon must lie in [0, 1/2]")
    if not 0 < lam <= 1:
        raise ValueError("lambda must lie in (0, 1]")
    _, best = even_covering_stats(cover)
    if best < lam:
        raise QuasitilingError(f"cover is only {best}-even, not {lam}-even")
    chosen: list[int] = []
    union: set = set()
    for i, s in enumerate(cover.sets):
        if len(s & union) <= epsilon * len(s):
            chosen.append(i)
            union |= s
    if len(union) < epsilon * lam * cover.ground_size:
        raise AssertionError("maximal eps-disjoint family must eps*lam-cover")
    return chosen


# ---------------------------------------------------------------------------
# tiles and placed tilings of sofic samples

TileShape = tuple[Word, ...]


def interval_tile(gen: str, length: int) -> TileShape:
    if length <= 0:
        raise ValueError("tile length must be positive")
    return tuple(power_word(gen, j) for j in range(length))


def box_tile(gens: list[str], lengths: list[int]) -> TileShape:
    if len(gens) != len(lengths):
        raise ValueError("one length per generator")
    shapes: list[Word] = [()]
    for g, n in zip(gens, lengths):
        if n <= 0:
            raise ValueError("tile lengths must be positive")
        shapes = [w + power_word(g, j) for w in shapes for j in range(n)]
    return tuple(shapes)


def _walk_plan(shape: TileShape):
    """Prefix-closed evaluation order so a tile image costs one permutation
    step per prefix instead of one per letter.

    Returns (steps, keep): steps are (parent index, generator, exponent)
    over the sorted prefix list, keep marks the indices of the shape words.
    """
    prefixes = sorted({w[:k] for w in shape for k in range(len(w) + 1)}, key=len)
    index = {w: i for i, w in enumerate(prefixes)}
    steps = [(index[w[:-1]], *w[-1]) for w in prefixes[1:]]
    keep = [index[w] for w in shape]
    return steps, keep


def place_tile(X: SoficSample, x: int, shape: TileShape, plan=None) -> frozenset:
    if plan is None:
        plan = _walk_plan(shape)
    steps, keep = plan
    pts = [x]
    append = pts.append
    for pi, g, e in steps:
        append(X.step(pts[pi], g, e))
    return frozenset(pts[i] for i in keep)


@dataclass(frozen=True)
class StageRecord:
    stage: int
    tile_len: int
    centers: int
    placed_area: int
    cumulative_coverage: Fraction


@dataclass(frozen=True)
class TileSystem:
    tiles: tuple[TileShape, ...]
    centers: tuple[tuple[int, ...], ...]
    epsilon: Fraction
    stages: tuple[StageRecord, ...] = ()

    def __post_init__(self):
        if len(self.tiles) != len(self.centers):
            raise ValueError("one center list per tile shape")


def _as_shape(group: GroupSpec, tile) -> TileShape:
    gens = group.generators
    if isinstance(tile, int):
        return interval_tile(gens[0], tile)
    if isinstance(tile, (list, tuple)) and all(isinstance(n, int) for n in tile):
        if len(tile) != len(gens):
            raise ValueError("box tile needs one length per generator")
        return box_tile(gens, list(tile))
    return tuple(tuple(w) for w in tile)


def required_stages(epsilon: Fraction) -> int:
    """Smallest m with (1 - eps/2)^m < eps."""
    m = 1
    shrink = 1 - epsilon / 2
    rem = shrink
    while rem >= epsilon:
        m += 1
        rem *= shrink
    return m


def quasitile_sample(
    X: SoficSample, group: GroupSpec, tiles: list, epsilon
) -> TileSystem:
    """Greedy staged quasitiling, largest tile first.

    Every stage scans all sample points as candidate centers and admits a
    placement when its image overlaps the union of everything already placed
    in at most an eps fraction of itself.  Stages continue on the smallest
    tile until enough stages have run that the uncovered remainder, shrinking
    by (1 - eps/2) per stage, must drop below eps.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if not tiles:
        raise ValueError("at least one tile shape required")
    shapes = sorted((_as_shape(group, t) for t in tiles), key=len, reverse=True)
    for big, small in zip(shapes, shapes[1:]):
        if len(big) < 8 * len(small):
            warnings.warn(
                f"tile sizes {len(big)}:{len(small)} below the 8x scale gap; "
                "tiling is best effort",
                stacklevel=2,
            )
    radius = max(len(w) for shape in shapes for w in shape)
    quality = sofic_quality(X, group, radius)
    if quality <= 1 - epsilon / 4:
        raise QualityError(quality, float(1 - epsilon / 4))

    plan = list(range(len(shapes)))
    plan += [len(shapes) - 1] * max(0, required_stages(epsilon) - len(shapes))
    walk_plans = [_walk_plan(s) for s in shapes]
    union: set = set()
    centers: list[list[int]] = [[] for _ in shapes]
    records: list[StageRecord] = []
    num, den = epsilon.numerator, epsilon.denominator
    for stage_no, k in enumerate(plan, start=1):
        before = len(union)
        placed = 0
        # two passes: exactly disjoint placements first, then placements
        # overlapping at most an eps fraction; exact covers stay exact
        images = [
            (x, place_tile(X, x, shapes[k], walk_plans[k])) for x in range(X.size)
        ]
        leftovers = []
        for x, img in images:
            if not img & union:
                union |= img
                centers[k].append(x)
                placed += 1
            else:
                leftovers.append((x, img))
        for x, img in leftovers:
            if den * len(img & union) <= num * len(img):
                union |= img
                centers[k].append(x)
                placed += 1
        records.append(
            StageRecord(
                stage=stage_no,
                tile_len=len(shapes[k]),
                centers=placed,
                placed_area=len(union) - before,
                cumulative_coverage=Fraction(len(union), X.size),
            )
        )
    coverage = Fraction(len(union), X.size)
    system = TileSystem(
        tiles=tuple(shapes),
        centers=tuple(tuple(c) for c in centers),
        epsilon=epsilon,
        stages=tuple(records),
    )
    if coverage < 1 - epsilon:
        raise CoverageError(coverage, system)
    return system


def verify_quasitiling(ts: TileSystem, X: SoficSample) -> tuple[bool, Fraction]:
    """Replay the placements in order, certifying eps-disjointness against
    the union of earlier tiles, and report the covered fraction."""
    union: set = set()
    disjoint = True
    for shape, centers in zip(ts.tiles, ts.centers):
        plan = _walk_plan(shape)
        for x in centers:
            img = place_tile(X, x, shape, plan)
            if len(img & union) > ts.epsilon * len(img):
                disjoint = False
            union |= img
    return disjoint, Fraction(len(union), X.size)


def tiling_report_rows(ts: TileSystem) -> list[str]:
    rows = ["stage,tile_len,centers,placed_area,cumulative_coverage"]
    for rec in ts.stages:
        rows.append(
            f"{rec.stage},{rec.tile_len},{rec.centers},"
            f"{rec.placed_area},{rec.cumulative_coverage}"
        )
    return rows
