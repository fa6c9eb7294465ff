"""Exact-arithmetic adelic ideal measures for group-ring operators on
finite sofic samples, with spectral and quasitiling companions."""

from .config import ExperimentConfig, FamilySpec, load_config, parse_config
from .groupring import GroupRingElement, adjoint, multiply, operator_matrix, parse_group_ring
from .matrices import ExactMatrix, SmithForm, determinant, matrix_from_csv, smith_normal_form
from .measures import (
    Ideal,
    IdealMeasure,
    interval_mass,
    kernel_length_identity,
    measure_distance,
    measure_of,
    serialize_measure,
)
from .quasitiling import (
    Cover,
    TileSystem,
    even_covering_stats,
    extract_disjoint_subcover,
    quasitile_sample,
    verify_quasitiling,
)
from .rings import RING_Z, RING_ZI, RingElement, factor_ideal, parse_element
from .sofic import GroupSpec, SoficSample, sofic_quality, torus_sample
from .spectral import group_moment, spectral_det_plus, spectral_summary

__all__ = [
    "ExperimentConfig",
    "FamilySpec",
    "load_config",
    "parse_config",
    "GroupRingElement",
    "adjoint",
    "multiply",
    "operator_matrix",
    "parse_group_ring",
    "ExactMatrix",
    "SmithForm",
    "determinant",
    "matrix_from_csv",
    "smith_normal_form",
    "Ideal",
    "IdealMeasure",
    "interval_mass",
    "kernel_length_identity",
    "measure_distance",
    "measure_of",
    "serialize_measure",
    "Cover",
    "TileSystem",
    "even_covering_stats",
    "extract_disjoint_subcover",
    "quasitile_sample",
    "verify_quasitiling",
    "RING_Z",
    "RING_ZI",
    "RingElement",
    "factor_ideal",
    "parse_element",
    "GroupSpec",
    "SoficSample",
    "sofic_quality",
    "torus_sample",
    "group_moment",
    "spectral_det_plus",
    "spectral_summary",
]

__version__ = "0.1.0"
