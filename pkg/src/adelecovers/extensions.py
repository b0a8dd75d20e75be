"""Finite abelian extensions of Q, encoded by kernel subgroups W of (Z/mZ)*.

An extension L is the fixed field of W inside Q(zeta_m), so Gal(L/Q) is
(Z/mZ)*/W and the character chi is the quotient map. The same field may be
stored at several moduli; equality always compares at the lcm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Callable, Iterable

from .arith import divisors, euler_phi, lcm, p_adic_split, squarefree_part
from .errors import CompositionMismatch, NotAnInclusion, NotAUnit
from .residue_groups import (
    GroupElement,
    QuotientGroup,
    Subgroup,
    UnitResidue,
    all_subgroups,
    lift_unit,
    unit_values,
)

__all__ = [
    "AbelianExtensionSpec",
    "ExtensionMorphism",
    "cyclotomic",
    "quadratic",
    "rational_field",
    "parse_extension",
    "kronecker_symbol",
    "conductor",
    "chi",
    "lift_to_common_modulus",
    "restriction",
    "compose_morphisms",
    "induced_cover_map",
    "subfields",
]


class AbelianExtensionSpec:
    """L = Q(zeta_m)^W given by a defining modulus and its kernel subgroup."""

    def __init__(self, modulus: int, kernel: Subgroup | Iterable[int]):
        if not isinstance(kernel, Subgroup):
            kernel = Subgroup(modulus, tuple(kernel))
        if kernel.modulus != modulus:
            raise ValueError("kernel modulus differs from extension modulus")
        self.modulus = modulus
        self.kernel = kernel

    @cached_property
    def galois_group(self) -> QuotientGroup:
        return QuotientGroup(self.modulus, self.kernel)

    @property
    def degree(self) -> int:
        return euler_phi(self.modulus) // len(self.kernel)

    def lift(self, n: int) -> AbelianExtensionSpec:
        """The same field described at a multiple n of the modulus."""
        if n == self.modulus:
            return self
        return AbelianExtensionSpec(n, self.kernel.lift(n))

    @cached_property
    def conductor(self) -> int:
        m, w = self.modulus, self.kernel
        for d in divisors(m):
            if all(x in w for x in unit_values(m) if x % d == 1 % d):
                return d
        raise AssertionError("unreachable: d = m always qualifies")

    def at_conductor(self) -> AbelianExtensionSpec:
        f = self.conductor
        return AbelianExtensionSpec(f, self.kernel.image(f))

    def contains(self, other: AbelianExtensionSpec) -> bool:
        """True when ``other`` is a subfield of ``self``."""
        a, b = lift_to_common_modulus(self, other)
        return a.kernel.issubset(b.kernel)

    def __eq__(self, other):
        if not isinstance(other, AbelianExtensionSpec):
            return NotImplemented
        a, b = lift_to_common_modulus(self, other)
        return a.kernel == b.kernel

    def __hash__(self):
        c = self.at_conductor()
        return hash((c.modulus, c.kernel.elements))

    def __repr__(self):
        return f"AbelianExtensionSpec(modulus={self.modulus}, kernel={list(self.kernel.elements)})"

    # JSON form: {"modulus": m, "kernel": [...]}
    def to_json(self) -> dict:
        return {"modulus": self.modulus, "kernel": list(self.kernel.elements)}

    @classmethod
    def from_json(cls, data: dict | str) -> AbelianExtensionSpec:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["modulus"]), [int(x) for x in data["kernel"]])


def rational_field() -> AbelianExtensionSpec:
    return AbelianExtensionSpec(1, Subgroup.trivial(1))


def cyclotomic(m: int) -> AbelianExtensionSpec:
    return AbelianExtensionSpec(m, Subgroup.trivial(m))


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v, n = p_adic_split(n, 2)
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def quadratic(d: int) -> AbelianExtensionSpec:
    """Q(sqrt d); the kernel is where the Kronecker character of disc(Q(sqrt d)) is 1."""
    d = squarefree_part(d)
    if d == 1:
        return rational_field()
    disc = d if d % 4 == 1 else 4 * d
    m = abs(disc)
    return AbelianExtensionSpec(m, [x for x in unit_values(m) if kronecker_symbol(disc, x) == 1])


def parse_extension(text: str) -> AbelianExtensionSpec:
    """Accepts JSON ``{"modulus": m, "kernel": [...]}``, ``cyclotomic:m`` or ``quadratic:d``."""
    text = text.strip()
    if text.startswith("{"):
        return AbelianExtensionSpec.from_json(text)
    kind, sep, arg = text.partition(":")
    if not sep:
        raise ValueError(f"unrecognised extension spec {text!r}")
    kind = kind.lower()
    if kind == "cyclotomic":
        return cyclotomic(int(arg))
    if kind == "quadratic":
        return quadratic(int(arg))
    if kind == "rational":
        return rational_field()
    raise ValueError(f"unrecognised extension kind {kind!r}")


def conductor(ext: AbelianExtensionSpec) -> int:
    return ext.conductor


def _as_residue_mod(u: UnitResidue | int, ext: AbelianExtensionSpec) -> int:
    """Bring u to a unit mod ext.modulus, lifting through the conductor when needed."""
    m = ext.modulus
    if isinstance(u, UnitResidue):
        n = u.modulus
        if n % m == 0:
            return u.value % m
        f = ext.conductor
        if n % f:
            raise ValueError(f"modulus {n} is not a multiple of the conductor {f}")
        return lift_unit(u.value % f, f, m)
    if gcd(u, m) != 1:
        raise NotAUnit(f"{u} is not coprime to {m}")
    return u % m


def chi(ext: AbelianExtensionSpec, u: UnitResidue | int) -> GroupElement:
    return ext.galois_group.element(_as_residue_mod(u, ext))


def lift_to_common_modulus(
    e1: AbelianExtensionSpec, e2: AbelianExtensionSpec
) -> tuple[AbelianExtensionSpec, AbelianExtensionSpec]:
    n = lcm(e1.modulus, e2.modulus)
    return e1.lift(n), e2.lift(n)


def restriction(big: AbelianExtensionSpec, small: AbelianExtensionSpec) -> Callable[[GroupElement], GroupElement]:
    """Galois restriction Gal(big/Q) -> Gal(small/Q); requires small ⊆ big."""
    if not big.contains(small):
        raise NotAnInclusion("restriction needs a subfield")
    m_big, m_small = big.modulus, small.modulus
    n = lcm(m_big, m_small)
    g_small = small.galois_group

    def r(g: GroupElement) -> GroupElement:
        y = lift_unit(g.rep, m_big, n) if n != m_big else g.rep
        return g_small.element(y % m_small)

    return r


@dataclass(frozen=True)
class ExtensionMorphism:
    """sigma = iota ∘ k : L1 -> L2 with iota the inclusion and k in Gal(L1/Q)."""

    source: AbelianExtensionSpec
    target: AbelianExtensionSpec
    twist: GroupElement

    def __post_init__(self):
        if not self.target.contains(self.source):
            raise NotAnInclusion("source field is not contained in target field")
        g1 = self.source.galois_group
        if (self.twist.group.modulus, self.twist.group.kernel) != (g1.modulus, g1.kernel):
            raise ValueError("twist must be an element of Gal(source/Q)")

    @classmethod
    def inclusion(cls, source: AbelianExtensionSpec, target: AbelianExtensionSpec) -> ExtensionMorphism:
        return cls(source, target, source.galois_group.identity)


def compose_morphisms(s1: ExtensionMorphism, s2: ExtensionMorphism) -> ExtensionMorphism:
    """s2 ∘ s1 : L1 -> L3, whose twist is r(k') k with r : Gal(L2) -> Gal(L1)."""
    if s1.target != s2.source:
        raise CompositionMismatch("target of the first morphism is not the source of the second")
    r = restriction(s1.target, s1.source)
    k2 = s2.twist
    if s2.source.modulus != s1.target.modulus or s2.source.kernel != s1.target.kernel:
        # same field at another modulus: move k' into s1.target's description
        k2 = restriction(s2.source, s1.target)(k2)
    return ExtensionMorphism(s1.source, s2.target, r(k2) * s1.twist)


def induced_cover_map(s: ExtensionMorphism) -> Callable[[GroupElement], GroupElement]:
    """rho_sigma : Gal(L2/Q) -> Gal(L1/Q), g -> r(g) k."""
    r = restriction(s.target, s.source)
    k = s.twist

    def rho(g: GroupElement) -> GroupElement:
        return r(g) * k

    return rho


def subfields(m: int) -> list[AbelianExtensionSpec]:
    """All subfields of Q(zeta_m), one per subgroup of (Z/mZ)*."""
    return [AbelianExtensionSpec(m, w) for w in all_subgroups(m)]
