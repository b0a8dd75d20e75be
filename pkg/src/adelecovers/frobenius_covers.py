"""Ramification, Frobenius monodromy and fibers of the finite covers X^chi -> X.

For an unramified prime p the preimage of the periodic orbit C_p is the mapping
torus of multiplication by Frob_p on G = Gal(L/Q): one circle for each coset of
<Frob_p>, each of length ord(Frob_p) * log p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import is_prime, prime_divisors, primes_up_to
from .errors import ArchimedeanZeroUnsupported, MissingArchimedeanPlace, RamifiedPrime
from .extensions import AbelianExtensionSpec, chi
from .places import INF, Place, sorted_places
from .residue_groups import GroupElement, lift_unit, unit_values

__all__ = [
    "CoverFiberReport",
    "RamificationReport",
    "StrataPoint",
    "DensityHistogram",
    "local_unit_image",
    "ramification_set",
    "frobenius",
    "cover_fiber_over_Cp",
    "archimedean_fiber",
    "fiber_stabilizer",
    "fiber_size",
    "is_unramified_outside",
    "density_scan",
]


@dataclass(frozen=True)
class RamificationReport:
    ramified_finite_primes: frozenset[int]
    always_ramified_archimedean: bool = True

    @property
    def smallest_unramified_outside_set(self) -> list[Place]:
        return sorted_places(set(self.ramified_finite_primes) | {INF})

    def to_json(self) -> dict:
        return {
            "ramified_finite_primes": sorted(self.ramified_finite_primes),
            "always_ramified_archimedean": self.always_ramified_archimedean,
            "smallest_unramified_outside_set": [str(v) for v in self.smallest_unramified_outside_set],
        }


@dataclass(frozen=True)
class CoverFiberReport:
    prime: int
    monodromy: GroupElement
    residue_degree: int
    component_count: int
    component_labels: tuple[tuple[int, ...], ...]
    # circle length is residue_degree * log(prime); only the multiplier is stored

    def __post_init__(self):
        assert self.component_count * self.residue_degree == len(self.monodromy.group)

    @property
    def circle_length_multiplier(self) -> int:
        return self.residue_degree

    @property
    def circle_length(self) -> float:
        return self.residue_degree * math.log(self.prime)

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "monodromy": self.monodromy.rep,
            "residue_degree": self.residue_degree,
            "component_count": self.component_count,
            "circle_length_multiplier": self.circle_length_multiplier,
            "component_labels": [list(c) for c in self.component_labels],
        }


@dataclass(frozen=True)
class StrataPoint:
    """A point of X_Q seen only through its zero set Z(x)."""

    zero_places: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "zero_places", frozenset(self.zero_places))


def local_unit_image(m: int, primes) -> list[int]:
    """Units mod m that are 1 away from the given primes: the image of prod_{p} Z_p^*."""
    rest = m
    for p in primes:
        while rest % p == 0:
            rest //= p
    return [x for x in unit_values(m) if x % rest == 1 % rest]


def ramification_set(ext: AbelianExtensionSpec) -> RamificationReport:
    m, w = ext.modulus, ext.kernel
    ramified = frozenset(
        p for p in prime_divisors(m) if m > 1 and not all(u in w for u in local_unit_image(m, [p]))
    )
    return RamificationReport(ramified)


def frobenius(ext: AbelianExtensionSpec, p: int) -> GroupElement:
    if not is_prime(p):
        raise ValueError(f"{p} is not a prime")
    f = ext.conductor
    if f % p == 0:
        raise RamifiedPrime(f"{p} divides the conductor {f}")
    m = ext.modulus
    if m % p:
        return chi(ext, p)
    return chi(ext, lift_unit(p % f, f, m))


def _cosets_of_cyclic(g: GroupElement) -> tuple[tuple[int, ...], ...]:
    grp = g.group
    h = g.powers()
    seen: set[int] = set()
    out = []
    for r in grp.elements:
        if r in seen:
            continue
        coset = tuple(sorted(grp.canon(r * x) for x in h))
        seen.update(coset)
        out.append(coset)
    return tuple(out)


def cover_fiber_over_Cp(ext: AbelianExtensionSpec, p: int) -> CoverFiberReport:
    frob = frobenius(ext, p)
    f = frob.order()
    labels = _cosets_of_cyclic(frob)
    return CoverFiberReport(
        prime=p,
        monodromy=frob,
        residue_degree=f,
        component_count=len(labels),
        component_labels=labels,
    )


def archimedean_fiber(ext: AbelianExtensionSpec) -> tuple[tuple[int, ...], ...]:
    """G / <chi(-1)>, one coset per archimedean place of L."""
    return _cosets_of_cyclic(chi(ext, -1 % ext.modulus if ext.modulus > 1 else 0))


def fiber_stabilizer(ext: AbelianExtensionSpec, x: StrataPoint) -> tuple[GroupElement, ...]:
    """chi(prod_{v in Z(x)} Z_v^*), the common stabilizer of the points of F_x."""
    if INF in x.zero_places:
        raise ArchimedeanZeroUnsupported("stabilizer is only defined when a_inf != 0")
    g = ext.galois_group
    reps = {g.canon(u) for u in local_unit_image(ext.modulus, x.zero_places)}
    return tuple(g.element(r) for r in sorted(reps))


def fiber_size(ext: AbelianExtensionSpec, x: StrataPoint) -> int:
    return len(ext.galois_group) // len(fiber_stabilizer(ext, x))


def is_unramified_outside(ext: AbelianExtensionSpec, S) -> bool:
    S = set(S)
    if INF not in S:
        raise MissingArchimedeanPlace("the archimedean place is ramified in every cover")
    return ramification_set(ext).ramified_finite_primes <= S


@dataclass(frozen=True)
class DensityHistogram:
    bound: int
    counts: dict[int, int]  # Frobenius representative -> number of primes
    total: int
    identity: int

    @property
    def nontrivial_fraction(self) -> Fraction:
        if not self.total:
            return Fraction(0)
        return Fraction(self.total - self.counts.get(self.identity, 0), self.total)

    def frequency(self, rep: int) -> Fraction:
        return Fraction(self.counts.get(rep, 0), self.total) if self.total else Fraction(0)

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "total": self.total,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "nontrivial_fraction": str(self.nontrivial_fraction),
        }


def density_scan(ext: AbelianExtensionSpec, bound: int) -> DensityHistogram:
    """Tally Frob_p over unramified primes p <= bound."""
    if bound < 2:
        raise ValueError("bound must be at least 2")
    g = ext.galois_group
    m, f = ext.modulus, ext.conductor
    table = {x: g.canon(x) for x in unit_values(m)}
    counts = {r: 0 for r in g.elements}
    total = 0
    for p in primes_up_to(bound):
        if f % p == 0:
            continue
        r = table[p % m] if m % p else frobenius(ext, p).rep
        counts[r] += 1
        total += 1
    return DensityHistogram(bound, counts, total, g.identity.rep)

