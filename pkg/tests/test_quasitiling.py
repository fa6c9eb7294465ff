import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from adelic.quasitiling import (
    Cover,
    CoverageError,
    QualityError,
    QuasitilingError,
    TileSystem,
    box_tile,
    even_covering_stats,
    extract_disjoint_subcover,
    find_low_overlap_member,
    interval_tile,
    make_cover,
    place_tile,
    quasitile_sample,
    required_stages,
    tiling_report_rows,
    verify_quasitiling,
)
from adelic.sofic import FREE_ABELIAN, GroupSpec, perturbed_sample, torus_sample

Z1 = GroupSpec(FREE_ABELIAN, 1)
Z2 = GroupSpec(FREE_ABELIAN, 2)


def interval_cover(ground, length):
    sets = [range(s, s + length) for s in range(ground - length + 1)]
    return make_cover(ground, sets)


random_covers = st.integers(3, 10).flatmap(
    lambda g: st.lists(
        st.sets(st.integers(0, g - 1), min_size=1, max_size=g),
        min_size=1,
        max_size=6,
    ).map(lambda sets: make_cover(g, sets))
)


class TestEvenCoveringStats:
    def test_partition(self):
        cover = make_cover(6, [{0, 1, 2}, {3, 4, 5}])
        assert even_covering_stats(cover) == (1, Fraction(1))

    def test_whole_ground(self):
        cover = make_cover(4, [set(range(4))])
        assert even_covering_stats(cover) == (1, Fraction(1))

    def test_interval_family(self):
        cover = interval_cover(10, 3)
        assert even_covering_stats(cover) == (3, Fraction(4, 5))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            even_covering_stats(make_cover(3, []))

    def test_members_validated(self):
        with pytest.raises(ValueError):
            make_cover(3, [set()])
        with pytest.raises(ValueError):
            make_cover(3, [{5}])

    @settings(max_examples=40, deadline=None)
    @given(random_covers)
    def test_reported_lambda_is_tight(self, cover):
        mult, lam = even_covering_stats(cover)
        total = sum(len(s) for s in cover.sets)
        assert total >= lam * mult * cover.ground_size
        assert total < (lam + Fraction(1, 1000)) * mult * cover.ground_size


class TestLowOverlapMember:
    def test_empty_target(self):
        cover = interval_cover(10, 3)
        assert find_low_overlap_member(cover, set(), Fraction(4, 5)) == 0

    def test_full_target_vacuous(self):
        cover = interval_cover(10, 3)
        assert find_low_overlap_member(cover, set(range(10)), Fraction(4, 5)) == 0

    def test_partial_target(self):
        cover = interval_cover(10, 3)
        i = find_low_overlap_member(cover, {0, 1, 2}, Fraction(4, 5))
        overlap = Fraction(len(cover.sets[i] & {0, 1, 2}), len(cover.sets[i]))
        assert overlap <= Fraction(3, 8)

    def test_precondition_enforced(self):
        cover = make_cover(10, [{0}])
        with pytest.raises(QuasitilingError):
            find_low_overlap_member(cover, set(), Fraction(1))

    @settings(max_examples=40, deadline=None)
    @given(random_covers, st.sets(st.integers(0, 9), max_size=10))
    def test_returned_index_satisfies_inequality(self, cover, Y):
        Y = {y for y in Y if y < cover.ground_size}
        _, lam = even_covering_stats(cover)
        i = find_low_overlap_member(cover, Y, lam)
        s = cover.sets[i]
        assert Fraction(len(s & Y), len(s)) <= Fraction(len(Y)) / (lam * cover.ground_size)


def greedy_conclusions_hold(cover, chosen, eps, lam):
    union = set()
    for i in chosen:
        s = cover.sets[i]
        if len(s & union) > eps * len(s):
            return False
        union |= s
    return len(union) >= eps * lam * cover.ground_size


class TestExtractDisjoint:
    def test_disjoint_cover_kept_whole(self):
        cover = make_cover(6, [{0, 1}, {2, 3}, {4, 5}])
        assert extract_disjoint_subcover(cover, Fraction(1, 4), Fraction(1)) == [0, 1, 2]

    def test_interval_trace(self):
        # at eps = 1/3 a one-point overlap (exactly eps of a 3-set) is
        # admissible, so the scan takes every other interval
        cover = interval_cover(10, 3)
        chosen = extract_disjoint_subcover(cover, Fraction(1, 3), Fraction(4, 5))
        assert chosen == [0, 2, 4, 6]
        assert greedy_conclusions_hold(cover, chosen, Fraction(1, 3), Fraction(4, 5))

    def test_eps_zero_maximal_disjoint(self):
        cover = interval_cover(10, 3)
        chosen = extract_disjoint_subcover(cover, 0, Fraction(4, 5))
        union = set()
        for i in chosen:
            assert not (cover.sets[i] & union)
            union |= cover.sets[i]

    def test_parameter_ranges(self):
        cover = interval_cover(6, 2)
        with pytest.raises(ValueError):
            extract_disjoint_subcover(cover, Fraction(3, 4), Fraction(1, 2))
        with pytest.raises(ValueError):
            extract_disjoint_subcover(cover, Fraction(1, 4), 0)

    @settings(max_examples=60, deadline=None)
    @given(random_covers, st.sampled_from([0, Fraction(1, 4), Fraction(1, 2)]))
    def test_conclusions_and_exhaustive_witness(self, cover, eps):
        _, lam = even_covering_stats(cover)
        if lam > 1:
            lam = Fraction(1)
        chosen = extract_disjoint_subcover(cover, eps, lam)
        assert greedy_conclusions_hold(cover, chosen, eps, lam)
        # the greedy family is among the satisfying subfamilies found by search
        n = len(cover.sets)
        satisfying = [
            list(sub)
            for r in range(n + 1)
            for sub in itertools.combinations(range(n), r)
            if greedy_conclusions_hold(cover, sub, eps, lam)
        ]
        assert chosen in satisfying


class TestTiles:
    def test_interval(self):
        assert interval_tile("t", 3) == ((), (("t", 1),), (("t", 1), ("t", 1)))

    def test_box(self):
        tile = box_tile(["t1", "t2"], [2, 2])
        assert len(tile) == 4

    def test_place_on_torus(self):
        X = torus_sample([10])
        img = place_tile(X, 7, interval_tile("t", 4))
        assert img == {7, 8, 9, 0}

    def test_bad_length(self):
        with pytest.raises(ValueError):
            interval_tile("t", 0)


class TestQuasitileSample:
    def test_exact_cover_by_single_tile(self):
        X = torus_sample([20])
        ts = quasitile_sample(X, Z1, [5], 0.25)
        ok, cov = verify_quasitiling(ts, X)
        assert ok and cov == 1

    def test_torus_1000(self):
        X = torus_sample([1000])
        ts = quasitile_sample(X, Z1, [5, 50, 500], 0.25)
        ok, cov = verify_quasitiling(ts, X)
        assert ok and cov >= Fraction(3, 4)
        assert len(ts.stages) >= required_stages(Fraction(1, 4))

    def test_two_dimensional_boxes(self):
        X = torus_sample([12, 12])
        ts = quasitile_sample(X, Z2, [[6, 6]], 0.5)
        ok, cov = verify_quasitiling(ts, X)
        assert ok and cov >= Fraction(1, 2)

    def test_quality_gate(self):
        X = perturbed_sample(torus_sample([60]), 0.5, seed=4)
        with pytest.raises(QualityError) as err:
            quasitile_sample(X, Z1, [5, 40], 0.25)
        assert 0 <= err.value.quality < 1

    def test_scale_gap_warning(self):
        X = torus_sample([40])
        with pytest.warns(UserWarning):
            quasitile_sample(X, Z1, [4, 8], 0.5)

    def test_stage_count_formula(self):
        assert required_stages(Fraction(1, 4)) == 11
        assert required_stages(Fraction(1, 2)) == 3


class TestVerify:
    def test_empty_system(self):
        X = torus_sample([5])
        ts = TileSystem(tiles=(), centers=(), epsilon=Fraction(1, 4))
        assert verify_quasitiling(ts, X) == (True, 0)

    def test_detects_violation(self):
        X = torus_sample([10])
        tile = interval_tile("t", 6)
        ts = TileSystem(tiles=(tile,), centers=((0, 1),), epsilon=Fraction(1, 4))
        ok, cov = verify_quasitiling(ts, X)
        assert not ok

    def test_report_rows(self):
        X = torus_sample([20])
        ts = quasitile_sample(X, Z1, [5], 0.25)
        rows = tiling_report_rows(ts)
        assert rows[0] == "stage,tile_len,centers,placed_area,cumulative_coverage"
        assert len(rows) == len(ts.stages) + 1
