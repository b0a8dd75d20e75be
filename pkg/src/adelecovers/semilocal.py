"""The semilocal adeles A_S = prod_{v in S} Q_v at finite working precision.

A finite component is either zero or ``unit * p**valuation`` with the unit kept
mod ``p**k``; the archimedean component is an exact rational. Gamma_S (signed
products of the primes of S) acts diagonally; the orbits are labelled by the
zero set Z(x), and the orbit over C_p reduces to mapping-torus coordinates.

Convention for negative archimedean components: the sign is divided out with
-1 in Gamma_S before any scale reduction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .arith import is_prime, lcm, p_adic_split, prime_divisors
from .errors import NotInGammaS, NotOnOrbitCp
from .extensions import AbelianExtensionSpec, chi
from .frobenius_covers import ramification_set
from .places import INF, Place, format_place, parse_place, sorted_places
from .profinite import (
    MappingTorusPoint,
    PrecisionProfile,
    TruncatedProfiniteUnit,
    reduce_to_fundamental_domain,
)
from .residue_groups import UnitResidue

__all__ = [
    "DEFAULT_PRECISION",
    "PlaceSet",
    "LocalComponent",
    "SemilocalAdele",
    "GammaSElement",
    "from_rationals",
    "parse_adele",
    "section_rho",
    "strata",
    "orbit_label",
    "act_gamma",
    "act_idele",
    "same_unit_class",
    "reduce_orbit_Cp",
    "collapsed_archimedean_fiber_check",
    "strata_json",
]

DEFAULT_PRECISION = 8


@dataclass(frozen=True)
class PlaceSet:
    """A finite set of places that always contains the archimedean place."""

    finite_primes: tuple[int, ...]

    def __init__(self, places: Iterable[Place] = ()):
        primes = sorted({parse_place(v) for v in places} - {INF})
        object.__setattr__(self, "finite_primes", tuple(primes))

    @property
    def includes_infinity(self) -> bool:
        return True

    @property
    def places(self) -> tuple[Place, ...]:
        return (*self.finite_primes, INF)

    def __contains__(self, v) -> bool:
        return v == INF or v in self.finite_primes

    def __iter__(self):
        return iter(self.places)

    def __len__(self) -> int:
        return len(self.finite_primes) + 1


@dataclass(frozen=True)
class LocalComponent:
    """Zero (``valuation is None``) or ``unit * prime**valuation`` with unit mod prime**precision."""

    prime: int
    precision: int
    valuation: int | None = None
    unit: int = 0

    def __post_init__(self):
        if self.valuation is not None:
            u = self.unit % self.prime**self.precision
            if u % self.prime == 0:
                raise ValueError(f"unit {self.unit} is divisible by {self.prime}")
            object.__setattr__(self, "unit", u)
        else:
            object.__setattr__(self, "unit", 0)

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @classmethod
    def from_rational(cls, x: Fraction, p: int, k: int) -> LocalComponent:
        x = Fraction(x)
        if x == 0:
            return cls(p, k)
        vn, un = p_adic_split(x.numerator, p)
        vd, ud = p_adic_split(x.denominator, p)
        return cls(p, k, vn - vd, un * pow(ud, -1, p**k))

    def scaled(self, x: Fraction) -> LocalComponent:
        """Multiply by a nonzero rational."""
        if self.is_zero:
            return self
        other = LocalComponent.from_rational(x, self.prime, self.precision)
        if other.is_zero:
            raise ValueError("scaling by zero leaves GL_1")
        return LocalComponent(
            self.prime, self.precision, self.valuation + other.valuation, self.unit * other.unit
        )

    def to_json(self):
        if self.is_zero:
            return "0"
        return {"valuation": self.valuation, "unit": self.unit}


@dataclass(frozen=True)
class SemilocalAdele:
    places: PlaceSet
    finite: tuple[LocalComponent, ...]  # aligned with places.finite_primes
    infinite: Fraction
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if tuple(c.prime for c in self.finite) != self.places.finite_primes:
            raise ValueError("components must match the finite places of S")
        if any(c.precision != self.precision for c in self.finite):
            raise ValueError("all finite components share one precision")
        object.__setattr__(self, "infinite", Fraction(self.infinite))

    def component(self, v: Place) -> LocalComponent | Fraction:
        if v == INF:
            return self.infinite
        return self.finite[self.places.finite_primes.index(v)]

    def is_zero_at(self, v: Place) -> bool:
        c = self.component(v)
        return c == 0 if v == INF else c.is_zero

    def to_json(self) -> dict:
        out = {str(c.prime): c.to_json() for c in self.finite}
        out[INF] = str(self.infinite)
        return out


def from_rationals(
    S: PlaceSet | Iterable[Place], values: Mapping, precision: int = DEFAULT_PRECISION
) -> SemilocalAdele:
    if not isinstance(S, PlaceSet):
        S = PlaceSet(S)
    vals = {parse_place(v): Fraction(x) for v, x in values.items()}
    if set(vals) != set(S.places):
        raise ValueError(f"values must be keyed exactly by {list(map(format_place, S.places))}")
    finite = tuple(LocalComponent.from_rational(vals[p], p, precision) for p in S.finite_primes)
    return SemilocalAdele(S, finite, vals[INF], precision)


def parse_adele(S: PlaceSet, text: str | Mapping, precision: int = DEFAULT_PRECISION) -> SemilocalAdele:
    """Parse ``{"2": "12", "3": "0", "inf": "-5/2"}`` (rational strings)."""
    data = json.loads(text) if isinstance(text, str) else dict(text)
    values = {parse_place(str(k)): Fraction(str(v)) for k, v in data.items()}
    return from_rationals(S, values, precision)


def section_rho(a: SemilocalAdele) -> SemilocalAdele:
    """Canonical representative mod prod_{p in S} Z_p^*: p**valuation or 0 at every prime."""
    finite = tuple(c if c.is_zero else LocalComponent(c.prime, c.precision, c.valuation, 1) for c in a.finite)
    return SemilocalAdele(a.places, finite, a.infinite, a.precision)


def same_unit_class(a: SemilocalAdele, b: SemilocalAdele) -> bool:
    """Whether a and b differ by an element of prod_{p in S} Z_p^*."""
    if a.places != b.places or a.infinite != b.infinite:
        return False
    return all(x.valuation == y.valuation for x, y in zip(a.finite, b.finite))


def strata(a: SemilocalAdele) -> tuple[frozenset, int]:
    z = frozenset(v for v in a.places if a.is_zero_at(v))
    return z, len(z)


def orbit_label(a: SemilocalAdele) -> frozenset:
    return strata(a)[0]


@dataclass(frozen=True)
class GammaSElement:
    """sign * prod p**n_p, an element of Gamma_S = Z_S^*."""

    sign: int
    exponents: tuple[tuple[int, int], ...]

    def __init__(self, sign: int = 1, exponents: Mapping[int, int] | Iterable = ()):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        exps = tuple(sorted((p, n) for p, n in dict(exponents).items() if n))
        for p, _ in exps:
            if not is_prime(p):
                raise ValueError(f"{p} is not a prime")
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "exponents", exps)

    @property
    def value(self) -> Fraction:
        x = Fraction(self.sign)
        for p, n in self.exponents:
            x *= Fraction(p) ** n
        return x

    @classmethod
    def from_rational(cls, x: Fraction | int, S: PlaceSet | None = None) -> GammaSElement:
        x = Fraction(x)
        if x == 0:
            raise NotInGammaS("0 is not a unit")
        exps: dict[int, int] = {}
        for p in prime_divisors(x.numerator) if abs(x.numerator) > 1 else []:
            exps[p] = p_adic_split(x.numerator, p)[0]
        for p in prime_divisors(x.denominator) if x.denominator > 1 else []:
            exps[p] = -p_adic_split(x.denominator, p)[0]
        g = cls(1 if x > 0 else -1, exps)
        if S is not None:
            g.check_in(S)
        return g

    def check_in(self, S: PlaceSet) -> None:
        for p, _ in self.exponents:
            if p not in S.finite_primes:
                raise NotInGammaS(f"{p} is not a finite place of S")

    def __mul__(self, other: GammaSElement) -> GammaSElement:
        return GammaSElement.from_rational(self.value * other.value)


def act_gamma(g: GammaSElement, a: SemilocalAdele) -> SemilocalAdele:
    g.check_in(a.places)
    x = g.value
    finite = tuple(c.scaled(x) for c in a.finite)
    return SemilocalAdele(a.places, finite, a.infinite * x, a.precision)


def act_idele(values: Mapping, a: SemilocalAdele) -> SemilocalAdele:
    """Multiply componentwise by an element of GL_1(A_S) given by nonzero rationals per place."""
    vals = {(INF if v == INF else int(v)): Fraction(x) for v, x in values.items()}
    if any(x == 0 for x in vals.values()):
        raise ValueError("idele components must be nonzero")
    finite = tuple(c.scaled(vals.get(c.prime, Fraction(1))) for c in a.finite)
    return SemilocalAdele(a.places, finite, a.infinite * vals.get(INF, Fraction(1)), a.precision)


def reduce_orbit_Cp(a: SemilocalAdele, p: int) -> MappingTorusPoint:
    """Canonical mapping-torus coordinates of a point on the orbit over C_p."""
    if p not in a.places.finite_primes:
        raise NotOnOrbitCp(f"{p} is not a finite place of S")
    if orbit_label(a) != frozenset({p}):
        raise NotOnOrbitCp(f"zero set {sorted(map(str, orbit_label(a)))} is not {{{p}}}")
    others = [c for c in a.finite if c.prime != p]
    # divide by sign(a_inf) * prod_{q != p} q**v_q, which makes every q-component a unit
    divisor = GammaSElement(
        1 if a.infinite > 0 else -1, {c.prime: c.valuation for c in others}
    ).value
    profile = PrecisionProfile({c.prime: a.precision for c in others})
    units = []
    for c in others:
        d = LocalComponent.from_rational(divisor, c.prime, c.precision)
        units.append(c.unit * pow(d.unit, -1, c.prime**c.precision))
    h = TruncatedProfiniteUnit(profile, tuple(units))
    return reduce_to_fundamental_domain(p, h, a.infinite / divisor)


def collapsed_archimedean_fiber_check(ext: AbelianExtensionSpec, S: Iterable[int]) -> bool:
    """Integers prime to S ∪ C(chi) reach every class of G under chi.

    This is what collapses the fiber over the adele that is 1 on S ∪ C(chi) and
    0 elsewhere, so no cover is unramified outside a set that omits infinity.
    """
    bad = set(S) | set(ramification_set(ext).ramified_finite_primes)
    rad = 1
    for q in bad:
        rad *= q
    f = ext.conductor
    g = ext.galois_group
    hit: set[int] = set()
    for n in range(1, lcm(rad, f) + 1):
        if gcd(n, rad) != 1:
            continue
        hit.add(chi(ext, UnitResidue(n % f, f)).rep)
        if len(hit) == len(g):
            return True
    return len(hit) == len(g)


def strata_json(a: SemilocalAdele) -> dict:
    z, nu = strata(a)
    label = sorted_places(z)
    return {"Z": [format_place(v) for v in label], "nu": nu, "orbit": [format_place(v) for v in label]}
