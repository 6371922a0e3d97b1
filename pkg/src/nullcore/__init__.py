"""Core sets of matrices over prime fields: null ideals, similarity classes and counting."""

__version__ = "0.1.0"

from .field import GF, ExtScalar, Poly, Scalar, build_extension, factorize  # noqa: E402
from .coreset import (  # noqa: E402
    CoreReport,
    is_core_factorwise,
    is_core_oracle,
    is_core_structural,
    is_pure_core,
)

__all__ = [
    "GF",
    "CoreReport",
    "ExtScalar",
    "Poly",
    "Scalar",
    "build_extension",
    "factorize",
    "is_core_factorwise",
    "is_core_oracle",
    "is_core_structural",
    "is_pure_core",
]
