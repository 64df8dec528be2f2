"""Garsia functions, Garsia norms and G-extremality on the unit disk.

The package is organized bottom up:

``boundary``
    circle grids, arc sets and sampled boundary functions
``poisson``
    Poisson and Herglotz extensions, harmonic measure of arcs
``factorization``
    Blaschke, singular inner and outer factors, spectra
``specs``
    composable function specs with a JSON form
``garsia``
    ``Phi_f``, norm searches and attainment verdicts
``extremal``
    extremality witnesses and the explicit constructions
``geometry``
    unit-ball geometry: parallelogram identity, extreme points, decompositions
``estimators``
    scikit-learn style wrappers
``cli``
    the ``garsia-kit`` command
"""

from .boundary import ArcSet, BoundaryFunction, CircleGrid, make_grid
from .errors import (
    AccuracyError,
    DegenerateInputError,
    DomainError,
    GarsiaError,
    LogIntegrabilityError,
    NumericalConsistencyError,
    ParameterError,
    PreconditionError,
    ShapeError,
    SpecError,
)
from .extremal import (
    EvidenceVerdict,
    LadderConfig,
    Section5Config,
    build_extremal_blaschke,
    check_inner_identity,
    check_product_identity,
    disk_algebra_test,
    outer_extremal_witness,
    product_extremal_witness,
    section5_build,
    section5_report,
)
from .garsia import NormEstimate, SearchConfig, Verdict, garsia_norm, is_norm_attaining, phi, sup_norm
from .geometry import extreme_probe, lipschitz_garsia_norm, nonextreme_decompose, parallelogram_check
from .poisson import DiskPoint, extend, harmonic_measure
from .specs import dump_spec, load_spec, parse_spec

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "ArcSet",
    "BoundaryFunction",
    "CircleGrid",
    "DegenerateInputError",
    "DiskPoint",
    "DomainError",
    "EvidenceVerdict",
    "GarsiaError",
    "LadderConfig",
    "LogIntegrabilityError",
    "NormEstimate",
    "NumericalConsistencyError",
    "ParameterError",
    "PreconditionError",
    "SearchConfig",
    "Section5Config",
    "ShapeError",
    "SpecError",
    "Verdict",
    "build_extremal_blaschke",
    "check_inner_identity",
    "check_product_identity",
    "disk_algebra_test",
    "dump_spec",
    "extend",
    "extreme_probe",
    "garsia_norm",
    "harmonic_measure",
    "is_norm_attaining",
    "lipschitz_garsia_norm",
    "load_spec",
    "make_grid",
    "nonextreme_decompose",
    "outer_extremal_witness",
    "parallelogram_check",
    "parse_spec",
    "phi",
    "product_extremal_witness",
    "section5_build",
    "section5_report",
    "sup_norm",
]
