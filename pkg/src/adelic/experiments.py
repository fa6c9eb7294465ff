"""Configuration-driven experiment runs emitting deterministic CSV.

Measure-valued columns are exact rationals rendered as num/den; analytic
bound columns are decimal.  Every run returns the written rows plus an audit
flag that is False as soon as any bound column fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .config import ExperimentConfig, FamilySpec
from .groupring import GroupRingElement, ceil_group_element, operator_matrix
from .matrices import rank_over_fraction_field
from .measures import (
    LOG_SLACK,
    MASS_SLACK,
    IdealMeasure,
    ideal_product,
    kernel_length_identity,
    measure_distance,
    measure_of,
    prime_power_ideal,
    serialize_measure,
    unit_ideal,
    zero_ideal,
)
from .quasitiling import (
    CoverageError,
    QualityError,
    quasitile_sample,
    tiling_report_rows,
    verify_quasitiling,
)
from .rings import FIELD_DEGREE, primes_with_norm_at_most
from .sofic import (
    FREE_ABELIAN,
    LAMPLIGHTER,
    SoficSample,
    perturbed_sample,
    torus_sample,
    wreath_quotient_sample,
)
from .spectral import group_moment, luck_zero_bound_check, spectral_summary


@dataclass(frozen=True)
class RunResult:
    path: str
    rows: tuple[str, ...]
    audits_ok: bool


def build_family_sample(
    config: ExperimentConfig, fam: FamilySpec, n: int
) -> SoficSample:
    if fam.kind == "torus":
        if config.group.kind != FREE_ABELIAN:
            raise ValueError("torus families need a free abelian group")
        return torus_sample([n] * config.group.dimension, label=fam.label)
    if fam.kind == "wreath":
        if config.group.kind != LAMPLIGHTER:
            raise ValueError("wreath families need the lamplighter group")
        return wreath_quotient_sample(n, label=fam.label)
    if fam.kind == "perturbed":
        if config.group.kind != FREE_ABELIAN:
            raise ValueError("perturbed families are built over torus bases")
        base = torus_sample([n] * config.group.dimension)
        return perturbed_sample(base, fam.epsilon_at(n), fam.seed + n, label=fam.label)
    raise ValueError(f"unknown family kind {fam.kind!r}")


def _write(path: str, rows: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def _identity_audit_ideals(a: GroupRingElement):
    """A couple of small composite ideals for the kernel-length column."""
    primes = primes_with_norm_at_most(a.ring, 5)[:2]
    ideals = []
    if primes:
        ideals.append(prime_power_ideal(primes[0], 2))
    if len(primes) > 1:
        ideals.append(
            ideal_product([prime_power_ideal(primes[0], 1), prime_power_ideal(primes[1], 1)])
        )
    return ideals


TOP_MASSES = 5


def _top_masses(nu: IdealMeasure) -> list[str]:
    ranked = sorted(nu.masses, key=lambda im: (-im[1], str(im[0])))
    cells = []
    for I, mass in ranked[:TOP_MASSES]:
        cells.extend([str(I), str(mass)])
    while len(cells) < 2 * TOP_MASSES:
        cells.extend(["-", "0"])
    return cells


def run_convergence(config: ExperimentConfig, plot: bool = False) -> RunResult:
    a = config.element
    deg = FIELD_DEGREE[a.ring]
    ceil_a = ceil_group_element(a)
    ideals = _identity_audit_ideals(a)

    # measures first, so the TV columns can pair families at matched positions
    measures: dict[tuple[int, int], IdealMeasure] = {}
    samples: dict[tuple[int, int], SoficSample] = {}
    for fi, fam in enumerate(config.families):
        for pos, n in enumerate(fam.schedule):
            X = build_family_sample(config, fam, n)
            samples[(fi, pos)] = X
            measures[(fi, pos)] = measure_of(a, X)

    header = (
        ["family", "n", "size", "rank", "nu_zero", "nu_unit"]
        + [c for k in range(1, TOP_MASSES + 1) for c in (f"ideal{k}", f"mass{k}")]
        + [
            "detplus_torsion",
            "detplus_bound_holds",
            "tail_mass",
            "tail_bound_holds",
            "len_identity_residual",
        ]
        + [f"tv_to_{f.label}" for f in config.families]
    )
    rows = [",".join(header)]
    audits_ok = True
    for fi, fam in enumerate(config.families):
        for pos, n in enumerate(fam.schedule):
            X = samples[(fi, pos)]
            nu = measures[(fi, pos)]
            nu_zero = nu.mass(zero_ideal(a.ring))
            nu_unit = nu.mass(unit_ideal(a.ring))
            rank = 1 - nu_zero  # free rank of the cokernel is the corank

            det = 1
            tails = []
            for I, mass in nu.masses:
                if I.is_zero or I.is_unit:
                    continue
                det *= I.ideal_norm() ** int(mass * X.size)
            det_holds = math.log(det) <= (
                X.size * deg * math.log(ceil_a) * (1 + LOG_SLACK) + MASS_SLACK
                if ceil_a > 1
                else MASS_SLACK
            )
            c = ceil_a ** deg
            for lam in config.lambdas:
                tail = sum(
                    (
                        mass
                        for I, mass in nu.masses
                        if not I.is_zero and not I.is_unit and I.ideal_norm() > lam
                    ),
                    Fraction(0),
                )
                if c <= 1:
                    tails.append((tail, tail == 0))
                else:
                    tails.append((tail, float(tail) <= math.log(c) / math.log(lam) + MASS_SLACK))
            tail_mass, tail_holds = tails[0] if tails else (Fraction(0), True)
            tail_holds = all(h for _, h in tails) if tails else True

            residual = Fraction(0)
            for I in ideals:
                lhs, rhs = kernel_length_identity(a, X, I)
                residual = max(residual, abs(lhs - rhs))

            audits_ok &= det_holds and tail_holds and residual == 0
            tvs = []
            for fj, other in enumerate(config.families):
                if pos < len(other.schedule) and (fj, pos) in measures:
                    tvs.append(str(measure_distance(nu, measures[(fj, pos)]) / 2))
                else:
                    tvs.append("-")
            rows.append(
                ",".join(
                    [fam.label, str(n), str(X.size), str(rank), str(nu_zero), str(nu_unit)]
                    + _top_masses(nu)
                    + [
                        str(det),
                        str(det_holds).lower(),
                        str(tail_mass),
                        str(tail_holds).lower(),
                        str(residual),
                    ]
                    + tvs
                )
            )
    _write(config.output, rows)
    if plot:
        from .plots import plot_convergence

        plot_convergence(config, rows)
    return RunResult(config.output, tuple(rows), audits_ok)


def run_spectral(config: ExperimentConfig, plot: bool = False) -> RunResult:
    a = config.element
    L = config.moments
    gm = [group_moment(config.group, a, l) for l in range(L + 1)]
    header = (
        ["family", "n", "size", "mu_zero"]
        + [f"m{l}" for l in range(L + 1)]
        + [f"g{l}" for l in range(L + 1)]
        + [f"gap{l}" for l in range(L + 1)]
        + ["detplus_spectral"]
        + [f"luck_holds_{e}" for e in config.epsilons]
    )
    rows = [",".join(header)]
    audits_ok = True
    for fam in config.families:
        for n in fam.schedule:
            X = build_family_sample(config, fam, n)
            summary = spectral_summary(a, X, L)
            mu_zero = Fraction(summary.kernel_dim, X.size)
            gaps = [abs(m - g) for m, g in zip(summary.moments, gm)]
            luck_cells = []
            for eps in config.epsilons:
                if a.ring != "Z":
                    luck_cells.append("na")
                    continue
                _, _, holds = luck_zero_bound_check(a, X, eps)
                audits_ok &= holds
                luck_cells.append(str(holds).lower())
            audits_ok &= summary.spectral_detplus >= 1
            rows.append(
                ",".join(
                    [fam.label, str(n), str(X.size), str(mu_zero)]
                    + [str(m) for m in summary.moments]
                    + [str(g) for g in gm]
                    + [str(g) for g in gaps]
                    + [str(summary.spectral_detplus)]
                    + luck_cells
                )
            )
    _write(config.output, rows)
    if plot:
        from .plots import plot_spectral

        plot_spectral(config, rows)
    return RunResult(config.output, tuple(rows), audits_ok)


def run_quasitile(config: ExperimentConfig, plot: bool = False) -> RunResult:
    if not config.tiles:
        raise ValueError("quasitile runs need a tiles = [...] config key")
    fam = config.families[0]
    n = fam.schedule[-1]
    X = build_family_sample(config, fam, n)
    try:
        ts = quasitile_sample(X, config.group, list(config.tiles), config.tile_epsilon)
    except QualityError as exc:
        rows = [
            "stage,tile_len,centers,placed_area,cumulative_coverage",
            f"error,quality,{exc.quality},threshold,{exc.needed}",
        ]
        _write(config.output, rows)
        return RunResult(config.output, tuple(rows), False)
    except CoverageError as exc:
        rows = tiling_report_rows(exc.system)
        rows.append(f"final,-,-,false,{exc.coverage}")
        _write(config.output, rows)
        return RunResult(config.output, tuple(rows), False)
    disjoint, coverage = verify_quasitiling(ts, X)
    rows = tiling_report_rows(ts)
    rows.append(f"final,-,-,{str(disjoint).lower()},{coverage}")
    audits_ok = disjoint and coverage >= 1 - Fraction(config.tile_epsilon)
    _write(config.output, rows)
    if plot:
        from .plots import plot_quasitile

        plot_quasitile(config, ts)
    return RunResult(config.output, tuple(rows), audits_ok)


def run_measure(config: ExperimentConfig, n: int) -> str:
    """Measure CSV for the first family at schedule value n."""
    fam = config.families[0]
    X = build_family_sample(config, fam, n)
    return serialize_measure(measure_of(config.element, X))
