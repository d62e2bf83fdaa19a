"""Semigroup-valued metric spaces and their shortest-path independence relation."""

from .errors import (
    AmalgamationError,
    AxiomViolation,
    Finding,
    GenericBuildError,
    InputError,
    MissingInfimumError,
    NoMaximumError,
    NonAssociativeError,
    TriangleError,
)
from .semigroup import (
    ZERO,
    PosetSemigroup,
    ValidationReport,
    canonical_key,
    enumerate_pocs,
    parse_semigroup_spec,
    path_semigroup,
    product_capped,
    sauer_semigroup,
    validate,
)

__version__ = "0.1.0"
