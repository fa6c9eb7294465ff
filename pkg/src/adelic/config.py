"""Experiment configuration parsing (TOML)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

try:
    import tomllib  # python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .groupring import GroupRingElement, parse_group_ring
from .rings import RING_Z, RING_ZI
from .sofic import FREE_ABELIAN, GroupSpec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    label: str
    kind: str  # torus | wreath | perturbed
    schedule: tuple[int, ...]
    epsilon: str | float | None = None  # perturbed only; "1/n" scales with n
    seed: int = 0

    def epsilon_at(self, n: int) -> float:
        if self.epsilon is None:
            return 0.0
        if isinstance(self.epsilon, str):
            text = self.epsilon.replace(" ", "")
            if text.endswith("/n"):
                return float(Fraction(text[:-2])) / n
            return float(Fraction(text))
        return float(self.epsilon)


@dataclass(frozen=True)
class ExperimentConfig:
    ring: str
    group: GroupSpec
    element: GroupRingElement
    families: tuple[FamilySpec, ...]
    moments: int = 3
    lambdas: tuple[float, ...] = (10.0, 100.0)
    epsilons: tuple[float, ...] = (0.5, 0.1, 0.01)
    output: str = "report.csv"
    seed: int = 0
    tiles: tuple = ()
    tile_epsilon: float = 0.25


def _require(data: dict, key: str):
    if key not in data:
        raise ConfigError(f"missing config key {key!r}")
    return data[key]


def _family(raw: dict, default_seed: int) -> FamilySpec:
    kind = _require(raw, "kind")
    if kind not in ("torus", "wreath", "perturbed"):
        raise ConfigError(f"unknown family kind {kind!r}")
    schedule = tuple(int(n) for n in _require(raw, "schedule"))
    if not schedule:
        raise ConfigError("family schedule must be nonempty")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ConfigError("family schedule must be strictly increasing")
    if any(n <= 0 for n in schedule):
        raise ConfigError("family schedule entries must be positive")
    return FamilySpec(
        label=str(raw.get("label", kind)),
        kind=kind,
        schedule=schedule,
        epsilon=raw.get("epsilon"),
        seed=int(raw.get("seed", default_seed)),
    )


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    ring = str(data.get("ring", RING_Z))
    if ring not in (RING_Z, RING_ZI):
        raise ConfigError(f"unknown ring tag {ring!r}")
    kind = str(data.get("group", FREE_ABELIAN))
    group = GroupSpec(kind, int(data.get("dimension", 1)))
    try:
        element = parse_group_ring(ring, _require(data, "element"))
    except ValueError as exc:
        raise ConfigError(f"bad element: {exc}") from exc
    if not element:
        raise ConfigError("element must be nonzero")

    seed = int(data.get("seed", 0))
    raw_families = data.get("family", [])
    if isinstance(raw_families, dict):
        raw_families = [raw_families]
    families = tuple(_family(f, seed) for f in raw_families)
    if not families:
        raise ConfigError("at least one [[family]] required")
    labels = [f.label for f in families]
    if len(set(labels)) != len(labels):
        raise ConfigError("family labels must be distinct")

    return ExperimentConfig(
        ring=ring,
        group=group,
        element=element,
        families=families,
        moments=int(data.get("moments", 3)),
        lambdas=tuple(float(x) for x in data.get("lambdas", [10, 100])),
        epsilons=tuple(float(x) for x in data.get("epsilons", [0.5, 0.1, 0.01])),
        output=str(data.get("output", "report.csv")),
        seed=seed,
        tiles=tuple(data.get("tiles", [])),
        tile_epsilon=float(data.get("tile_epsilon", 0.25)),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
