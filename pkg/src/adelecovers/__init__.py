"""Finite abelian covers of the periodic orbits of the adele class space.

Abelian extensions of Q are kernel subgroups of (Z/mZ)^*; everything else
(Frobenius fibers, semilocal strata, Schwartz tables, K-theory ranks) is exact
finite arithmetic built on that representation.
"""

from .errors import DomainError
from .extensions import (
    AbelianExtensionSpec,
    ExtensionMorphism,
    compose_morphisms,
    cyclotomic,
    induced_cover_map,
    parse_extension,
    quadratic,
    rational_field,
)
from .frobenius_covers import (
    archimedean_fiber,
    cover_fiber_over_Cp,
    density_scan,
    fiber_stabilizer,
    frobenius,
    ramification_set,
)
from .ktheory import pq_instance, solve
from .profinite import linking_data, reduce_to_fundamental_domain
from .semilocal import PlaceSet, from_rationals, reduce_orbit_Cp, strata
from .schwartz import ProductBSFunction, is_factorable_at

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "AbelianExtensionSpec",
    "ExtensionMorphism",
    "compose_morphisms",
    "cyclotomic",
    "induced_cover_map",
    "parse_extension",
    "quadratic",
    "rational_field",
    "archimedean_fiber",
    "cover_fiber_over_Cp",
    "density_scan",
    "fiber_stabilizer",
    "frobenius",
    "ramification_set",
    "pq_instance",
    "solve",
    "linking_data",
    "reduce_to_fundamental_domain",
    "PlaceSet",
    "from_rationals",
    "reduce_orbit_Cp",
    "strata",
    "ProductBSFunction",
    "is_factorable_at",
]
