"""Exact arithmetic in (Z/mZ)* and its quotients.

Subgroups are stored by full enumeration of their elements; cosets are named
by their smallest positive representative. For ``m = 1`` the unit group is the
trivial group whose single element is written ``0`` (the residue of every
integer mod 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable

from .arith import euler_phi, lcm, multiplicative_order
from .errors import InvalidGenerator, NotASubgroup, NotAUnit

__all__ = [
    "UnitResidue",
    "Subgroup",
    "QuotientGroup",
    "GroupElement",
    "unit_group",
    "unit_values",
    "element_order",
    "subgroup_generated",
    "quotient",
    "all_subgroups",
    "crt_split",
    "lift_unit",
    "common_modulus",
]


def _check_modulus(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"modulus must be a positive integer, got {m!r}")


@dataclass(frozen=True, order=True)
class UnitResidue:
    value: int
    modulus: int

    def __post_init__(self):
        _check_modulus(self.modulus)
        v = self.value % self.modulus
        if gcd(v, self.modulus) != 1:
            raise NotAUnit(f"{self.value} is not a unit mod {self.modulus}")
        object.__setattr__(self, "value", v)

    def __mul__(self, other: UnitResidue) -> UnitResidue:
        if other.modulus != self.modulus:
            raise ValueError("moduli differ")
        return UnitResidue(self.value * other.value, self.modulus)

    def __pow__(self, n: int) -> UnitResidue:
        if self.modulus == 1:
            return self
        return UnitResidue(pow(self.value, n, self.modulus), self.modulus)

    def inverse(self) -> UnitResidue:
        return self ** -1

    def reduce(self, d: int) -> UnitResidue:
        """Image under (Z/mZ)* -> (Z/dZ)* for d dividing m."""
        if self.modulus % d:
            raise ValueError(f"{d} does not divide {self.modulus}")
        return UnitResidue(self.value, d)

    def __int__(self) -> int:
        return self.value


@lru_cache(maxsize=512)
def unit_values(m: int) -> tuple[int, ...]:
    """Residues in ``[0, m)`` coprime to ``m``, ascending."""
    _check_modulus(m)
    if m == 1:
        return (0,)
    return tuple(x for x in range(1, m) if gcd(x, m) == 1)


def unit_group(m: int) -> list[UnitResidue]:
    return [UnitResidue(x, m) for x in unit_values(m)]


def element_order(x: UnitResidue | int, m: int | None = None) -> int:
    if isinstance(x, UnitResidue):
        x, m = x.value, x.modulus
    if m is None:
        raise TypeError("modulus required for a bare integer")
    if gcd(x, m) != 1:
        raise NotAUnit(f"{x} is not a unit mod {m}")
    return multiplicative_order(x, m)


def _closure(m: int, gens: Iterable[int]) -> frozenset[int]:
    one = 1 % m
    elems = {one}
    frontier = [one]
    gens = [g % m for g in gens]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a * g % m
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(elems)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of (Z/mZ)*, held as its sorted tuple of elements."""

    modulus: int
    elements: tuple[int, ...]

    def __post_init__(self):
        _check_modulus(self.modulus)
        m = self.modulus
        elems = tuple(sorted({x % m for x in self.elements}))
        object.__setattr__(self, "elements", elems)
        s = set(elems)
        if 1 % m not in s:
            raise NotASubgroup("subgroup must contain 1")
        for x in elems:
            if gcd(x, m) != 1:
                raise NotASubgroup(f"{x} is not a unit mod {m}")
        # a finite set is a subgroup iff it equals the closure of a greedy generating
        # subset of itself; this keeps the check at O(|S| log |S|)
        gens: list[int] = []
        closed = frozenset({1 % m})
        for x in elems:
            if x not in closed:
                gens.append(x)
                closed = _closure(m, gens)
                if not closed <= s:
                    raise NotASubgroup(f"products of {gens} mod {m} escape the set")
        assert euler_phi(m) % len(elems) == 0

    @classmethod
    def trivial(cls, m: int) -> Subgroup:
        return cls(m, (1 % m,))

    @classmethod
    def full(cls, m: int) -> Subgroup:
        return cls(m, unit_values(m))

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    def __contains__(self, x) -> bool:
        return int(x) % self.modulus in self._set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index(self) -> int:
        return euler_phi(self.modulus) // len(self.elements)

    def issubset(self, other: Subgroup) -> bool:
        if other.modulus != self.modulus:
            raise ValueError("moduli differ")
        return self._set <= other._set

    def lift(self, n: int) -> Subgroup:
        """Preimage under the reduction (Z/nZ)* -> (Z/mZ)*, for m | n."""
        m = self.modulus
        if n % m:
            raise ValueError(f"{m} does not divide {n}")
        return Subgroup(n, tuple(x for x in unit_values(n) if x % m in self._set))

    def image(self, d: int) -> Subgroup:
        """Image under reduction mod d, for d | m."""
        if self.modulus % d:
            raise ValueError(f"{d} does not divide {self.modulus}")
        return Subgroup(d, tuple(x % d for x in self.elements))


def subgroup_generated(modulus: int, generators: Iterable[UnitResidue | int]) -> Subgroup:
    _check_modulus(modulus)
    gens = []
    for g in generators:
        if isinstance(g, UnitResidue):
            if g.modulus != modulus:
                raise InvalidGenerator(f"{g} lives mod {g.modulus}, not mod {modulus}")
            g = g.value
        if gcd(g, modulus) != 1:
            raise InvalidGenerator(f"{g} is not coprime to {modulus}")
        gens.append(g)
    return Subgroup(modulus, tuple(_closure(modulus, gens)))


def all_subgroups(m: int) -> list[Subgroup]:
    """Every subgroup of (Z/mZ)*, by closing under one extra generator at a time."""
    units = unit_values(m)
    seen = {frozenset({1 % m})}
    frontier = list(seen)
    while frontier:
        nxt = []
        for h in frontier:
            for g in units:
                if g in h:
                    continue
                k = _closure(m, list(h) + [g])
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return sorted((Subgroup(m, tuple(s)) for s in seen), key=lambda s: (len(s), s.elements))


@dataclass(frozen=True)
class QuotientGroup:
    """(Z/mZ)* / kernel, with cosets named by minimal representatives."""

    modulus: int
    kernel: Subgroup

    def __post_init__(self):
        if not isinstance(self.kernel, Subgroup):
            raise NotASubgroup("kernel must be a verified Subgroup")
        if self.kernel.modulus != self.modulus:
            raise ValueError("kernel modulus differs from quotient modulus")

    @cached_property
    def _canon(self) -> dict[int, int]:
        m = self.modulus
        table: dict[int, int] = {}
        for x in unit_values(m):
            if x in table:
                continue
            for w in self.kernel.elements:
                table[x * w % m] = x
        return table

    @cached_property
    def elements(self) -> tuple[int, ...]:
        """Canonical representatives, ascending."""
        return tuple(sorted(set(self._canon.values())))

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self, 1 % self.modulus)

    def canon(self, x: int | UnitResidue) -> int:
        x = int(x) % self.modulus
        try:
            return self._canon[x]
        except KeyError:
            raise NotAUnit(f"{x} is not a unit mod {self.modulus}") from None

    def element(self, x: int | UnitResidue) -> GroupElement:
        return GroupElement(self, self.canon(x))

    def __iter__(self):
        return (GroupElement(self, r) for r in self.elements)

    def coset(self, rep: int) -> tuple[int, ...]:
        rep = self.canon(rep)
        return tuple(sorted(x for x, r in self._canon.items() if r == rep))

    def cosets(self) -> list[tuple[int, ...]]:
        return [self.coset(r) for r in self.elements]


@dataclass(frozen=True, order=True)
class GroupElement:
    """A coset of the kernel, named by its minimal representative."""

    group: QuotientGroup = field(compare=False, repr=False)
    rep: int
    _key: tuple = field(init=False, repr=False, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "_key", (self.group.modulus, self.group.kernel.elements))

    def __mul__(self, other: GroupElement) -> GroupElement:
        if other._key != self._key:
            raise ValueError("elements of different groups")
        return self.group.element(self.rep * other.rep)

    def __pow__(self, n: int) -> GroupElement:
        m = self.group.modulus
        if m == 1:
            return self
        return self.group.element(pow(self.rep, n, m))

    def inverse(self) -> GroupElement:
        return self ** -1

    @property
    def is_identity(self) -> bool:
        return self.rep == 1 % self.group.modulus

    def order(self) -> int:
        n, x = 1, self
        while not x.is_identity:
            x = x * self
            n += 1
        return n

    def powers(self) -> tuple[int, ...]:
        """Sorted representatives of the cyclic subgroup generated by this element."""
        out, x = {self.group.identity.rep}, self
        while not x.is_identity:
            out.add(x.rep)
            x = x * self
        return tuple(sorted(out))


def quotient(modulus: int, kernel: Subgroup | Iterable[int]) -> QuotientGroup:
    if not isinstance(kernel, Subgroup):
        kernel = Subgroup(modulus, tuple(kernel))
    return QuotientGroup(modulus, kernel)


def crt_split(x: UnitResidue, m1: int, m2: int) -> tuple[UnitResidue, UnitResidue]:
    """Components of x under (Z/m1m2)* = (Z/m1)* x (Z/m2)* for coprime m1, m2."""
    if gcd(m1, m2) != 1 or m1 * m2 != x.modulus:
        raise ValueError("need coprime factors of the modulus")
    return UnitResidue(x.value, m1), UnitResidue(x.value, m2)


def lift_unit(x: int, d: int, m: int) -> int:
    """Smallest unit mod m congruent to x mod d (d | m, x a unit mod d)."""
    if m % d:
        raise ValueError(f"{d} does not divide {m}")
    if gcd(x, d) != 1:
        raise NotAUnit(f"{x} is not a unit mod {d}")
    base = x % d
    for t in range(m // d):
        y = base + t * d
        if gcd(y, m) == 1:
            return y % m
    raise AssertionError("unreachable: reduction of units is surjective")


def common_modulus(*ms: int) -> int:
    return lcm(*ms)
