"""End-to-end acceptance checks.

Each test covers one headline guarantee of the package and prints a single
pass/fail line; timed checks assert their own runtime budget.
"""

import math
import os
import random
import time
from fractions import Fraction

from adelic.cli import main
from adelic.config import load_config
from adelic.groupring import (
    GroupRingElement,
    ceil_group_element,
    operator_matrix,
    parse_shorthand,
    rank_normalized,
)
from adelic.matrices import (
    ExactMatrix,
    ceil_matrix,
    gcd_minor_divisors,
    kernel_length_brute_force,
    kernel_length_mod_power,
    matrix_from_ints,
    smith_normal_form,
)
from adelic.measures import (
    detplus_bound_check,
    ideal_of,
    kernel_length_identity,
    measure_distance,
    measure_of,
    serialize_measure,
    tail_mass_check,
    torsion_det_plus,
    zero_ideal,
)
from adelic.quasitiling import (
    even_covering_stats,
    extract_disjoint_subcover,
    find_low_overlap_member,
    make_cover,
    quasitile_sample,
    verify_quasitiling,
)
from adelic.rings import RING_Z, RING_ZI, gel, norm, zel
from adelic.sofic import FREE_ABELIAN, GroupSpec, perturbed_sample, torus_sample
from adelic.rings import prime_ideal
from adelic.spectral import (
    group_moment,
    luck_zero_bound_check,
    moment_gap,
    positive_part,
    spectral_det_plus,
)

Z1 = GroupSpec(FREE_ABELIAN, 1)
CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def report(line):
    print(f"[acceptance] {line}")


def random_z_matrix(rng, max_size=6, span=9):
    k = rng.randint(1, max_size)
    return matrix_from_ints(
        RING_Z, [[rng.randint(-span, span) for _ in range(k)] for _ in range(k)]
    )


def random_zi_matrix(rng, max_size=5, span=9):
    k = rng.randint(1, max_size)
    return ExactMatrix(
        RING_ZI,
        k,
        k,
        tuple(gel(rng.randint(-span, span), rng.randint(-span, span)) for _ in range(k * k)),
    )


def oracle_corpus():
    rng = random.Random(20260824)
    mats = [random_z_matrix(rng) for _ in range(500)]
    mats += [random_zi_matrix(rng) for _ in range(200)]
    return mats


def random_laurent(rng, support=4, span=3, exps=2):
    terms = {}
    for _ in range(rng.randint(1, support)):
        k = rng.randint(-exps, exps)
        c = rng.randint(-span, span)
        w = tuple(("t", 1 if k >= 0 else -1) for _ in range(abs(k)))
        terms[w] = zel(terms.get(w, zel(0)).a + c)
    terms = {w: c for w, c in terms.items() if c}
    return GroupRingElement.from_dict(RING_Z, terms)


def test_snf_matches_minor_oracle_on_seeded_corpus():
    t0 = time.monotonic()
    for A in oracle_corpus():
        snf = smith_normal_form(A)
        assert tuple(gcd_minor_divisors(A)) == snf.divisors
        assert snf.P @ snf.D @ snf.Q == A
    elapsed = time.monotonic() - t0
    assert elapsed < 15, f"oracle corpus took {elapsed:.1f}s"
    report(f"snf vs gcd-minor oracle, 700 matrices in {elapsed:.1f}s: PASS")


def test_kernel_length_identity_on_seeded_corpus():
    t0 = time.monotonic()
    rng = random.Random(33)
    brute_checked = 0
    for _ in range(200):
        a = random_laurent(rng, exps=3)
        n = rng.randint(2, 12)
        X = torus_sample([n])
        primes = rng.sample([2, 3, 5], rng.randint(1, 2))
        factors = [(p, rng.randint(1, 3)) for p in primes]
        gen = 1
        for p, e in factors:
            gen *= p**e
        lhs, rhs = kernel_length_identity(a, X, ideal_of(zel(gen)))
        assert lhs == rhs
        A = operator_matrix(a, X)
        for p, e in factors:
            mp = prime_ideal(zel(p))
            if (p**e) ** n <= 300_000:
                assert kernel_length_mod_power(A, mp, e) == kernel_length_brute_force(A, mp, e)
                brute_checked += 1
    elapsed = time.monotonic() - t0
    assert brute_checked > 0
    assert elapsed < 60, f"kernel-length corpus took {elapsed:.1f}s"
    report(
        f"kernel-length identity, 200 instances ({brute_checked} brute-force "
        f"cross-checks) in {elapsed:.1f}s: PASS"
    )


def test_torsion_detplus_equals_minor_norms():
    for A in oracle_corpus():
        expected = 1
        for d in gcd_minor_divisors(A):
            expected *= norm(d)
        assert torsion_det_plus(A) == expected
    report("torsion det+ equals norm of the rank-minor gcd ideal, 700 matrices: PASS")


def test_bound_audits_have_zero_violations():
    rng = random.Random(77)
    pairs = 0
    violations = 0
    for _ in range(130):
        a = random_laurent(rng)
        if not a:
            a = parse_shorthand(RING_Z, "1")
        n = rng.randint(2, 12)
        X = torus_sample([n])
        _, _, ok = detplus_bound_check(a, X)
        violations += not ok
        pairs += 1
        for lam in (10, 100):
            _, _, ok = tail_mass_check(a, X, lam)
            violations += not ok
            pairs += 1
        for eps in (0.5, 0.1, 0.01):
            _, _, ok = luck_zero_bound_check(a, X, eps)
            violations += not ok
            pairs += 1
        violations += not (
            ceil_matrix(operator_matrix(a, X)) <= ceil_group_element(a) + 1e-9
        )
        pairs += 1
    for _ in range(30):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            k = rng.randint(-2, 2)
            w = tuple(("t", 1 if k >= 0 else -1) for _ in range(abs(k)))
            terms[w] = gel(rng.randint(-2, 2), rng.randint(-2, 2))
        a = GroupRingElement.from_dict(RING_ZI, {w: c for w, c in terms.items() if c})
        if not a:
            continue
        X = torus_sample([rng.randint(2, 8)])
        _, _, ok = detplus_bound_check(a, X)
        violations += not ok
        pairs += 1
        for lam in (10, 100):
            _, _, ok = tail_mass_check(a, X, lam)
            violations += not ok
            pairs += 1
        violations += not (
            ceil_matrix(operator_matrix(a, X)) <= ceil_group_element(a) + 1e-9
        )
        pairs += 1
    assert pairs >= 1000, f"only {pairs} audit pairs"
    assert violations == 0
    report(f"bound audits, {pairs} instance-parameter pairs, 0 violations: PASS")


def test_exact_rank_and_measure_values():
    a = parse_shorthand(RING_Z, "1 - t")
    for n in (4, 8, 16, 64, 256):
        X = torus_sample([n])
        assert rank_normalized(a, X) == Fraction(n - 1, n)
        assert measure_of(a, X).mass(zero_ideal(RING_Z)) == Fraction(1, n)
    nu = measure_of(parse_shorthand(RING_Z, "1 + t"), torus_sample([5]))
    assert serialize_measure(nu) == "ideal,mass_num,mass_den\n1,4,5\n2,1,5"
    report("exact rank/measure values for 1-t and 1+t tori: PASS")


def test_moment_identities_and_detplus_integrality():
    a = parse_shorthand(RING_Z, "1 - t")
    assert [group_moment(Z1, a, l) for l in range(6)] == [1, 2, 6, 20, 70, 252]
    for n in (4, 8, 16):
        for l in range(6):
            if n > 2 * l:
                assert moment_gap(Z1, a, torus_sample([n]), l) == 0
    rng = random.Random(5)
    for _ in range(50):
        b = random_laurent(rng)
        B = operator_matrix(positive_part(b), torus_sample([rng.randint(2, 8)]))
        val = spectral_det_plus(B)
        assert isinstance(val, int) and val >= 1
    report("moment identities and spectral det+ integrality: PASS")


def test_convergence_between_torus_and_perturbed_families():
    a = parse_shorthand(RING_Z, "1 + t")
    tvs = {}
    for n in (20, 200):
        torus = torus_sample([n])
        pert = perturbed_sample(torus, 1.0 / n, seed=7 + n)
        nu_t, nu_p = measure_of(a, torus), measure_of(a, pert)
        tvs[n] = measure_distance(nu_t, nu_p) / 2
        z = zero_ideal(RING_Z)
        assert abs(nu_t.mass(z) - nu_p.mass(z)) <= Fraction(2, n)
        assert abs(rank_normalized(a, torus) - rank_normalized(a, pert)) <= Fraction(2, n)
    assert tvs[200] < Fraction(5, 100)
    assert tvs[200] < tvs[20]
    report(f"convergence: TV(20)={tvs[20]}, TV(200)={tvs[200]}: PASS")


def test_quasitiling_guarantees():
    t0 = time.monotonic()
    X = torus_sample([1000])
    ts = quasitile_sample(X, Z1, [5, 50, 500], 0.25)
    ok, cov = verify_quasitiling(ts, X)
    elapsed = time.monotonic() - t0
    assert ok and cov >= Fraction(3, 4)
    assert elapsed < 5, f"torus-1000 tiling took {elapsed:.1f}s"

    import itertools

    rng = random.Random(99)
    for _ in range(200):
        g = rng.randint(3, 10)
        sets = [
            set(rng.sample(range(g), rng.randint(1, g)))
            for _ in range(rng.randint(1, 6))
        ]
        cover = make_cover(g, sets)
        _, lam = even_covering_stats(cover)
        lam = min(lam, Fraction(1))
        eps = rng.choice([0, Fraction(1, 4), Fraction(1, 2)])
        chosen = extract_disjoint_subcover(cover, eps, lam)
        union = set()
        for i in chosen:
            s = cover.sets[i]
            assert len(s & union) <= eps * len(s)
            union |= s
        assert len(union) >= eps * lam * g
        satisfying = []
        for r in range(len(sets) + 1):
            for sub in itertools.combinations(range(len(sets)), r):
                u = set()
                good = True
                for i in sub:
                    s = cover.sets[i]
                    if len(s & u) > eps * len(s):
                        good = False
                        break
                    u |= s
                if good and len(u) >= eps * lam * g:
                    satisfying.append(list(sub))
        assert chosen in satisfying
        for _ in range(3):
            Y = set(rng.sample(range(g), rng.randint(0, g)))
            i = find_low_overlap_member(cover, Y, lam)
            s = cover.sets[i]
            assert Fraction(len(s & Y), len(s)) <= Fraction(len(Y)) / (lam * g)
    report(f"quasitiling: torus-1000 coverage {cov} in {elapsed:.1f}s, 200 cover checks: PASS")


def test_shipped_configs_rerun_byte_identical(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    jobs = [
        ("converge_z.toml", "converge"),
        ("spectral_z.toml", "spectral"),
        ("quasitile.toml", "quasitile"),
        ("converge_zi.toml", "converge"),
    ]
    for name, command in jobs:
        path = os.path.join(CONFIG_DIR, name)
        assert main([command, path]) == 0
        out = tmp_path / load_config(path).output
        first = out.read_bytes()
        assert main([command, path]) == 0
        assert out.read_bytes() == first
    report("shipped configs rerun byte-identical: PASS")
