"""Truncated profinite units prod_q Z_q^* and the mapping torus over C_p.

An element of prod_{q in Q} Z_q^* is kept as its residues mod q**k_q. The
preimage of C_p is p^Z \\ (H x R_+^*) with H = prod_{q != p} Z_q^*; points are
normalised to the fundamental domain 1 <= t < p, the stripped power of p being
pushed into the group coordinate as (diag p)**(-n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Mapping

from .arith import is_prime, lcm, multiplicative_order
from .errors import InvalidScale, NotAUnit, SelfLinkingUndefined

__all__ = [
    "PrecisionProfile",
    "TruncatedProfiniteUnit",
    "MappingTorusPoint",
    "LinkingData",
    "diagonal_embed",
    "multiplicative_order_of",
    "injectivity_witness",
    "linking_data",
    "monodromy_action",
    "reduce_to_fundamental_domain",
]


@dataclass(frozen=True)
class PrecisionProfile:
    """Finite map prime q -> exponent k_q >= 1, stored sorted by q."""

    entries: tuple[tuple[int, int], ...]

    def __init__(self, entries: Mapping[int, int] | tuple = ()):
        items = sorted(dict(entries).items())
        for q, k in items:
            if not is_prime(q):
                raise ValueError(f"{q} is not a prime")
            if k < 1:
                raise ValueError(f"precision at {q} must be >= 1, got {k}")
        object.__setattr__(self, "entries", tuple(items))

    @classmethod
    def uniform(cls, primes, k: int) -> PrecisionProfile:
        return cls({q: k for q in primes})

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.entries)

    def moduli(self) -> tuple[int, ...]:
        return tuple(q**k for q, k in self.entries)

    def __contains__(self, q: int) -> bool:
        return q in self.primes

    def __getitem__(self, q: int) -> int:
        return dict(self.entries)[q]

    def without(self, p: int) -> PrecisionProfile:
        return PrecisionProfile({q: k for q, k in self.entries if q != p})


@dataclass(frozen=True)
class TruncatedProfiniteUnit:
    profile: PrecisionProfile
    residues: tuple[int, ...]

    def __post_init__(self):
        mods = self.profile.moduli()
        if len(self.residues) != len(mods):
            raise ValueError("one residue per supported prime is required")
        res = tuple(r % n for r, n in zip(self.residues, mods))
        for (q, _), r in zip(self.profile.entries, res):
            if r % q == 0:
                raise NotAUnit(f"{r} is not a unit in Z_{q}")
        object.__setattr__(self, "residues", res)

    @classmethod
    def identity(cls, profile: PrecisionProfile) -> TruncatedProfiniteUnit:
        return cls(profile, tuple(1 for _ in profile.entries))

    @classmethod
    def from_rational(cls, x: Fraction | int, profile: PrecisionProfile) -> TruncatedProfiniteUnit:
        """Image of a rational that is a unit at every supported prime."""
        x = Fraction(x)
        res = []
        for n, (q, _) in zip(profile.moduli(), profile.entries):
            if x.numerator % q == 0 or x.denominator % q == 0:
                raise NotAUnit(f"{x} is not a unit at {q}")
            res.append(x.numerator * pow(x.denominator, -1, n))
        return cls(profile, tuple(res))

    def _check(self, other: TruncatedProfiniteUnit) -> None:
        if other.profile != self.profile:
            raise ValueError("precision profiles differ")

    def __mul__(self, other: TruncatedProfiniteUnit) -> TruncatedProfiniteUnit:
        self._check(other)
        return TruncatedProfiniteUnit(
            self.profile, tuple(a * b for a, b in zip(self.residues, other.residues))
        )

    def __pow__(self, n: int) -> TruncatedProfiniteUnit:
        return TruncatedProfiniteUnit(
            self.profile, tuple(pow(a, n, m) for a, m in zip(self.residues, self.profile.moduli()))
        )

    def inverse(self) -> TruncatedProfiniteUnit:
        return self ** -1

    @property
    def is_identity(self) -> bool:
        return all(r == 1 % m for r, m in zip(self.residues, self.profile.moduli()))

    def component(self, q: int) -> int:
        return self.residues[self.profile.primes.index(q)]

    def truncate(self, profile: PrecisionProfile) -> TruncatedProfiniteUnit:
        """Reduce to a coarser profile (subset of primes, no larger exponents)."""
        res = []
        for q, k in profile.entries:
            if q not in self.profile or self.profile[q] < k:
                raise ValueError(f"cannot raise precision at {q}")
            res.append(self.component(q) % q**k)
        return TruncatedProfiniteUnit(profile, tuple(res))

    def to_json(self) -> dict:
        return {f"{q}^{k}": r for (q, k), r in zip(self.profile.entries, self.residues)}


def diagonal_embed(p: int, profile: PrecisionProfile) -> TruncatedProfiniteUnit:
    """p seen in prod_{q != p} Z_q^*: the image of Frob_p."""
    if p in profile:
        raise SelfLinkingUndefined(f"{p} is a unit only away from itself")
    if p < 2:
        raise ValueError(f"expected an integer >= 2, got {p}")
    return TruncatedProfiniteUnit(profile, tuple(p for _ in profile.entries))


def multiplicative_order_of(u: TruncatedProfiniteUnit) -> int:
    return lcm(1, *(multiplicative_order(r, m) for r, m in zip(u.residues, u.profile.moduli())))


@dataclass(frozen=True)
class LinkingData:
    p: int
    q: int
    precision: int
    residue: int  # p mod q**precision
    order: int
    witness_horizon: int

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "precision": self.precision,
            "residue": self.residue,
            "order": self.order,
            "witness_horizon": self.witness_horizon,
        }


def linking_data(p: int, q: int, k: int, bound: int | None = None) -> LinkingData:
    if p == q:
        raise SelfLinkingUndefined("linking of a prime with itself is not defined")
    u = diagonal_embed(p, PrecisionProfile({q: k}))
    order = multiplicative_order_of(u)
    horizon = order if bound is None else min(bound, order)
    return LinkingData(p, q, k, u.residues[0], order, horizon)


def injectivity_witness(p: int, q: int, k: int, bound: int | None = None) -> bool:
    """Check by enumeration that n -> p**n mod q**k is injective below the order."""
    data = linking_data(p, q, k, bound)
    n = q**k
    seen = set()
    x = 1
    for _ in range(data.witness_horizon):
        if x in seen:
            return False
        seen.add(x)
        x = x * p % n
    return True


@dataclass(frozen=True)
class MappingTorusPoint:
    """(h, t) in the fundamental domain 1 <= t < p.

    ``shift`` records the power of p stripped from the original scale; it is
    bookkeeping only and does not take part in equality.
    """

    excluded_prime: int
    h: TruncatedProfiniteUnit
    t: Fraction
    shift: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.excluded_prime in self.h.profile:
            raise SelfLinkingUndefined("group coordinate must avoid the excluded prime")
        object.__setattr__(self, "t", Fraction(self.t))

    @property
    def log_scale(self) -> tuple[int, Fraction]:
        return self.shift, self.t

    @property
    def is_canonical(self) -> bool:
        return 1 <= self.t < self.excluded_prime

    def to_json(self) -> dict:
        return {
            "excluded_prime": self.excluded_prime,
            "h": self.h.to_json(),
            "n": self.shift,
            "t": str(self.t),
        }


def monodromy_action(pt: MappingTorusPoint) -> MappingTorusPoint:
    """One loop around C_p: multiply the group coordinate by p."""
    d = diagonal_embed(pt.excluded_prime, pt.h.profile)
    return MappingTorusPoint(pt.excluded_prime, pt.h * d, pt.t, pt.shift)


def _floor_log(x: Fraction, p: int) -> int:
    """Largest n with p**n <= x, exactly."""
    n = floor((math.log(x.numerator) - math.log(x.denominator)) / math.log(p))
    while Fraction(p) ** n > x:
        n -= 1
    while Fraction(p) ** (n + 1) <= x:
        n += 1
    return n


def reduce_to_fundamental_domain(
    p: int, h: TruncatedProfiniteUnit, lam: Fraction | int | str
) -> MappingTorusPoint:
    lam = Fraction(lam)
    if lam <= 0:
        raise InvalidScale(f"scale must be positive, got {lam}")
    n = _floor_log(lam, p)
    h2 = h * diagonal_embed(p, h.profile) ** (-n)
    t = lam / Fraction(p) ** n
    return MappingTorusPoint(p, h2, t, n)

