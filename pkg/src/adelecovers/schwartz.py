"""Finite models of Bruhat-Schwartz functions on semilocal adeles.

At a prime p a window (j, k) describes functions supported in p^-j Z_p and
constant on cosets of p^k Z_p. Cell ``a`` in ``range(p**(j+k))`` is the coset
``a * p**-j + p**k Z_p``, so Z_p itself is the set of cells with
``a % p**j == 0``. A function of several places is an exact-rational table
over the product grid. The archimedean factor is only a tag: it is never
evaluated, and functions can be added or multiplied only when their tags match.

Functions on different place sets are compared inside S(A_Q): a missing place
v is read as the factor 1_{Z_v}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .arith import is_prime, p_adic_split
from .errors import NotFactorable, PlaceAlreadyPresent, PlaceNotPresent
from .semilocal import GammaSElement, PlaceSet

__all__ = [
    "LocalWindow",
    "ProductBSFunction",
    "CrossProductElement",
    "GlueCheck",
    "indicator_Zp",
    "scalar",
    "is_factorable_at",
    "factor_out",
    "extend",
    "sheaf_glue_check",
    "is_in_sections",
    "crossproduct_membership",
]

DEFAULT_TAG = "phi_inf"


@dataclass(frozen=True, order=True)
class LocalWindow:
    prime: int
    outer: int = 0  # j: support in p^-j Z_p
    inner: int = 0  # k: constant on p^k Z_p

    def __post_init__(self):
        if not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not a prime")
        if self.outer < 0 or self.inner < 0:
            raise ValueError("window exponents must be nonnegative")

    @property
    def size(self) -> int:
        return self.prime ** (self.outer + self.inner)

    def in_Zp(self, a: int) -> bool:
        return a % self.prime**self.outer == 0

    def cell_of(self, x: Fraction) -> int | None:
        """Cell containing the rational x, or None outside p^-j Z_p."""
        x = Fraction(x)
        p, j, k = self.prime, self.outer, self.inner
        if x == 0:
            return 0
        vn, un = p_adic_split(x.numerator, p)
        vd, ud = p_adic_split(x.denominator, p)
        if vn - vd < -j:
            return None
        mod = p ** (j + k)
        y = un * pow(ud, -1, mod) % mod
        shift = vn - vd + j
        return y * pow(p, shift, mod) % mod if shift < j + k else 0

    def refined_to(self, other: LocalWindow) -> list[int | None]:
        """For each cell of the finer window ``other``, the cell of self containing it."""
        if other.prime != self.prime or other.outer < self.outer or other.inner < self.inner:
            raise ValueError(f"{other} does not refine {self}")
        p = self.prime
        step = p ** (other.outer - self.outer)
        mod = self.size
        return [(a // step) % mod if a % step == 0 else None for a in range(other.size)]

    def join(self, other: LocalWindow) -> LocalWindow:
        return LocalWindow(self.prime, max(self.outer, other.outer), max(self.inner, other.inner))


def _fraction_array(shape, fill=0) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(fill))
    return arr


class ProductBSFunction:
    """Exact table over prod_v (cells of window_v), times a tagged archimedean factor."""

    def __init__(self, windows: Iterable[LocalWindow], values, archimedean_marker: str = DEFAULT_TAG):
        windows = tuple(windows)
        primes = [w.prime for w in windows]
        if len(set(primes)) != len(primes):
            raise ValueError("one window per prime")
        order = sorted(range(len(windows)), key=lambda i: primes[i])
        arr = np.array(values, dtype=object)
        shape = tuple(w.size for w in windows)
        if arr.shape != shape:
            arr = arr.reshape(shape)
        arr = np.vectorize(Fraction, otypes=[object])(arr) if arr.size else _fraction_array(shape)
        self.windows = tuple(windows[i] for i in order)
        self.values = np.transpose(arr, order) if windows else arr
        self.values.setflags(write=False)
        self.archimedean_marker = archimedean_marker

    # -- structure -------------------------------------------------------
    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(w.prime for w in self.windows)

    def axis(self, v: int) -> int:
        try:
            return self.primes.index(v)
        except ValueError:
            raise PlaceNotPresent(f"{v} is not a place of this function") from None

    def window(self, v: int) -> LocalWindow:
        return self.windows[self.axis(v)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.values.flat)

    def __call__(self, point: Mapping[int, Fraction]) -> Fraction:
        """Value at a point given by rational coordinates; absent places read as 0."""
        for v, x in point.items():
            if v not in self.primes and LocalWindow(v).cell_of(Fraction(x)) is None:
                return Fraction(0)
        idx = []
        for w in self.windows:
            cell = w.cell_of(Fraction(point.get(w.prime, 0)))
            if cell is None:
                return Fraction(0)
            idx.append(cell)
        return self.values[tuple(idx)]

    # -- change of grid --------------------------------------------------
    def refine(self, window: LocalWindow) -> ProductBSFunction:
        """Re-express the table on a finer window at one prime."""
        ax = self.axis(window.prime)
        src = self.window(window.prime).refined_to(window)
        taken = np.take(self.values, [0 if s is None else s for s in src], axis=ax)
        taken = np.array(taken, dtype=object)
        mask_shape = [1] * taken.ndim
        mask_shape[ax] = len(src)
        outside = np.array([s is None for s in src]).reshape(mask_shape)
        taken = np.where(np.broadcast_to(outside, taken.shape), Fraction(0), taken)
        windows = list(self.windows)
        windows[ax] = window
        return ProductBSFunction(windows, taken, self.archimedean_marker)

    def with_places(self, primes: Iterable[int]) -> ProductBSFunction:
        """Tensor with 1_{Z_v} at every listed prime not already present."""
        f = self
        for v in sorted(set(primes) - set(self.primes)):
            f = extend(f, v)
        return f

    def aligned(self, other: ProductBSFunction) -> tuple[ProductBSFunction, ProductBSFunction]:
        """Both functions on the same places and the same (joined) windows."""
        a = self.with_places(other.primes)
        b = other.with_places(self.primes)
        for wa, wb in zip(a.windows, b.windows):
            w = wa.join(wb)
            if w != wa:
                a = a.refine(w)
            if w != wb:
                b = b.refine(w)
        return a, b

    # -- algebra ---------------------------------------------------------
    def _check_tag(self, other: ProductBSFunction) -> None:
        if self.archimedean_marker != other.archimedean_marker:
            raise ValueError("archimedean tags differ")

    def __add__(self, other: ProductBSFunction) -> ProductBSFunction:
        self._check_tag(other)
        a, b = self.aligned(other)
        return ProductBSFunction(a.windows, a.values + b.values, self.archimedean_marker)

    def __neg__(self) -> ProductBSFunction:
        return ProductBSFunction(self.windows, -self.values, self.archimedean_marker)

    def __sub__(self, other: ProductBSFunction) -> ProductBSFunction:
        return self + (-other)

    def scale(self, c) -> ProductBSFunction:
        return ProductBSFunction(self.windows, self.values * Fraction(c), self.archimedean_marker)

    def __mul__(self, other: ProductBSFunction) -> ProductBSFunction:
        """Pointwise product."""
        self._check_tag(other)
        a, b = self.aligned(other)
        return ProductBSFunction(a.windows, a.values * b.values, self.archimedean_marker)

    def twisted(self, q: Fraction | int) -> ProductBSFunction:
        """x -> f(x / q), i.e. U_q f U_q^-1, at every finite place."""
        q = Fraction(q)
        if q == 0:
            raise ValueError("q must be nonzero")
        f = self
        moved = {}
        for p in set(_support_primes(q)) | set(self.primes):
            vn, un = p_adic_split(q.numerator, p)
            vd, ud = p_adic_split(q.denominator, p)
            moved[p] = (vn - vd, Fraction(un, ud))
        f = f.with_places(moved)
        for p, (n, _) in moved.items():
            w = f.window(p)
            need = LocalWindow(p, max(w.outer, n), max(w.inner, -n))
            if need != w:
                f = f.refine(need)
        values = f.values
        windows = list(f.windows)
        for ax, w in enumerate(f.windows):
            p = w.prime
            n, u = moved[p]
            mod = w.size
            u_inv = u.denominator * pow(u.numerator, -1, mod) % mod if mod > 1 else 0
            # new cell a' (window j-n, k+n) reads old cell a' * u^-1 (window j, k)
            src = [a * u_inv % mod for a in range(mod)] if mod > 1 else [0]
            values = np.take(values, src, axis=ax)
            windows[ax] = LocalWindow(p, w.outer - n, w.inner + n)
        return ProductBSFunction(windows, np.array(values, dtype=object), f.archimedean_marker)

    # -- comparison and serialisation -----------------------------------
    def __eq__(self, other):
        if not isinstance(other, ProductBSFunction):
            return NotImplemented
        if self.archimedean_marker != other.archimedean_marker:
            return False
        a, b = self.aligned(other)
        return bool(np.all(a.values == b.values))

    def __hash__(self):
        raise TypeError("ProductBSFunction is unhashable")

    def __repr__(self):
        ws = ", ".join(f"{w.prime}:(j={w.outer},k={w.inner})" for w in self.windows)
        return f"ProductBSFunction([{ws}], nonzero={sum(1 for x in self.values.flat if x)})"

    def to_json(self) -> dict:
        return {
            "places": [{"prime": w.prime, "j": w.outer, "k": w.inner} for w in self.windows],
            "values": np.vectorize(str, otypes=[object])(self.values).tolist()
            if self.values.ndim
            else str(self.values[()]),
            "archimedean": self.archimedean_marker,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> ProductBSFunction:
        if isinstance(data, str):
            data = json.loads(data)
        windows = [LocalWindow(int(d["prime"]), int(d.get("j", 0)), int(d.get("k", 0))) for d in data["places"]]
        raw = np.array(data["values"], dtype=object)
        vals = np.vectorize(lambda s: Fraction(str(s)), otypes=[object])(raw) if raw.size else raw
        return cls(windows, vals, data.get("archimedean", DEFAULT_TAG))


def _support_primes(q: Fraction) -> list[int]:
    from .arith import prime_divisors

    out = []
    for n in (q.numerator, q.denominator):
        if abs(n) > 1:
            out.extend(prime_divisors(n))
    return out


def scalar(c=1, archimedean_marker: str = DEFAULT_TAG) -> ProductBSFunction:
    """The function on A_{inf} alone: an empty product of finite places."""
    return ProductBSFunction((), np.array(Fraction(c), dtype=object), archimedean_marker)


def indicator_Zp(p: int, window: LocalWindow | None = None) -> ProductBSFunction:
    return extend(scalar(1), p, window)


def is_factorable_at(f: ProductBSFunction, v: int) -> bool:
    """Whether f = 1_{Z_v} ⊗ g: zero off Z_v and invariant under Z_v-translation."""
    ax = f.axis(v)
    w = f.windows[ax]
    vals = np.moveaxis(f.values, ax, 0)
    inside = [a for a in range(w.size) if w.in_Zp(a)]
    if any(x != 0 for a in range(w.size) if not w.in_Zp(a) for x in vals[a : a + 1].flat):
        return False
    ref = vals[inside[0] : inside[0] + 1]
    return all(np.all(vals[a : a + 1] == ref) for a in inside[1:])


def factor_out(f: ProductBSFunction, v: int) -> ProductBSFunction:
    """g with f = 1_{Z_v} ⊗ g, namely g(y) = f(0_v, y)."""
    if not is_factorable_at(f, v):
        raise NotFactorable(f"function does not factor through 1_Z_{v}")
    ax = f.axis(v)
    g_vals = np.take(f.values, 0, axis=ax)
    windows = f.windows[:ax] + f.windows[ax + 1 :]
    return ProductBSFunction(windows, np.array(g_vals, dtype=object), f.archimedean_marker)


def extend(g: ProductBSFunction, v: int, window: LocalWindow | None = None) -> ProductBSFunction:
    """gamma(S, S ∪ {v}): g -> 1_{Z_v} ⊗ g, tabulated on the given window at v."""
    if v in g.primes:
        raise PlaceAlreadyPresent(f"{v} is already a place of this function")
    window = window or LocalWindow(v)
    if window.prime != v:
        raise ValueError("window prime differs from v")
    ind = np.array([Fraction(int(window.in_Zp(a))) for a in range(window.size)], dtype=object)
    vals = np.multiply.outer(g.values, ind)
    return ProductBSFunction((*g.windows, window), vals, g.archimedean_marker)


def is_in_sections(f: ProductBSFunction, S: Iterable) -> bool:
    """f ∈ O(S^c): factorable at every finite place of f outside S."""
    S = set(S)
    return all(is_factorable_at(f, v) for v in f.primes if v not in S)


@dataclass(frozen=True)
class GlueCheck:
    member: bool  # f in O(S^c) for S the intersection
    premise: bool  # f in O(S_j^c) for every j
    consistent: bool  # premise implies member

    def __bool__(self) -> bool:
        return self.member


def sheaf_glue_check(f: ProductBSFunction, S_list: list[Iterable]) -> GlueCheck:
    sets = [set(s) for s in S_list]
    if not sets:
        raise ValueError("need at least one place set")
    S = set.intersection(*sets)
    member = is_in_sections(f, S)
    premise = all(is_in_sections(f, s) for s in sets)
    return GlueCheck(member, premise, member or not premise)


class CrossProductElement:
    """h = sum_q f_q U_q, keys q nonzero rationals, coefficients nonzero functions."""

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict[Fraction, ProductBSFunction] = {}
        for q, f in items:
            q = Fraction(q)
            if q == 0:
                raise ValueError("keys must be nonzero")
            out[q] = out[q] + f if q in out else f
        self.terms = {q: f for q, f in sorted(out.items()) if not f.is_zero()}

    def __add__(self, other: CrossProductElement) -> CrossProductElement:
        return CrossProductElement([*self.terms.items(), *other.terms.items()])

    def __mul__(self, other: CrossProductElement) -> CrossProductElement:
        """(f U_q)(h U_r) = f (h ∘ q^-1) U_{qr}."""
        out = []
        for q, f in self.terms.items():
            for r, h in other.terms.items():
                out.append((q * r, f * h.twisted(q)))
        return CrossProductElement(out)

    def __eq__(self, other):
        if not isinstance(other, CrossProductElement):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and all(
            self.terms[q] == other.terms[q] for q in self.terms
        )

    def __repr__(self):
        return f"CrossProductElement({ {str(q): f for q, f in self.terms.items()} })"


def crossproduct_membership(h: CrossProductElement, S: PlaceSet | Iterable) -> bool:
    """h ∈ S(A_S) ⋊ Z_S^*: keys in Gamma_S and coefficients in O(S^c)."""
    if not isinstance(S, PlaceSet):
        S = PlaceSet(S)
    for q, f in h.terms.items():
        g = GammaSElement.from_rational(q)
        if any(p not in S.finite_primes for p, _ in g.exponents):
            return False
        if not is_in_sections(f, S.finite_primes):
            return False
    return True
