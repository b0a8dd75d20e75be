"""Rank solver for cyclic six-term exact sequences of free abelian groups.

Unknowns are the node ranks n_i and the image ranks r_i of the map
f_i : node_i -> node_{i+1}. Exactness at node i, together with
rank = rank(ker) + rank(im), gives n_i = r_{i-1} + r_i. Map annotations add
equalities (zero, injective, surjective, given image rank) and the bounds
0 <= r_i <= min(n_i, n_{i+1}) hold throughout. Equations with one unknown are
propagated first; if that leaves unknowns, the affine solution set is found by
exact Gaussian elimination and the integer points inside the bounds are
enumerated along the free directions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InvalidHexagon

__all__ = [
    "ZERO",
    "INJECTIVE",
    "SURJECTIVE",
    "ImageRank",
    "NodeSpec",
    "MapAnnotation",
    "HexagonInstance",
    "HexagonSolution",
    "solve",
    "verify_exactness",
    "pq_instance",
    "load_instance",
]

ZERO = "zero"
INJECTIVE = "injective"
SURJECTIVE = "surjective"


@dataclass(frozen=True)
class ImageRank:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise InvalidHexagon("image rank must be nonnegative")


@dataclass(frozen=True)
class NodeSpec:
    name: str
    rank: int | None = None
    torsion_free: bool = True

    def __post_init__(self):
        if self.rank is not None and self.rank < 0:
            raise InvalidHexagon(f"rank of {self.name} must be nonnegative")


@dataclass(frozen=True)
class MapAnnotation:
    source: str
    target: str
    properties: frozenset = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        props = frozenset(self.properties)
        object.__setattr__(self, "properties", props)
        images = [p for p in props if isinstance(p, ImageRank)]
        if len(images) > 1:
            raise InvalidHexagon(f"{self.label}: several image ranks given")
        for p in props:
            if p not in (ZERO, INJECTIVE, SURJECTIVE) and not isinstance(p, ImageRank):
                raise InvalidHexagon(f"{self.label}: unknown property {p!r}")
        if ZERO in props and images and images[0].rank != 0:
            raise InvalidHexagon(f"{self.label}: zero map with nonzero image rank")

    @property
    def label(self) -> str:
        return self.name or f"{self.source}->{self.target}"

    @property
    def image_rank(self) -> int | None:
        for p in self.properties:
            if isinstance(p, ImageRank):
                return p.rank
        return None


@dataclass(frozen=True)
class HexagonInstance:
    nodes: tuple[NodeSpec, ...]
    maps: tuple[MapAnnotation, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.nodes) != 6 or len(self.maps) != 6:
            raise InvalidHexagon("a hexagon has six nodes and six maps")
        names = [n.name for n in self.nodes]
        if len(set(names)) != 6:
            raise InvalidHexagon("node names must be distinct")
        for i, m in enumerate(self.maps):
            if (m.source, m.target) != (names[i], names[(i + 1) % 6]):
                raise InvalidHexagon(
                    f"map {i} must go {names[i]} -> {names[(i + 1) % 6]}, got {m.source} -> {m.target}"
                )
        for n in self.nodes:
            if not n.torsion_free:
                raise InvalidHexagon(f"{n.name}: only torsion-free nodes are supported")

    def with_ranks(self, ranks: dict[str, int], image_ranks: Sequence[int] | None = None) -> HexagonInstance:
        nodes = tuple(NodeSpec(n.name, ranks.get(n.name, n.rank), n.torsion_free) for n in self.nodes)
        maps = self.maps
        if image_ranks is not None:
            maps = tuple(
                MapAnnotation(
                    m.source,
                    m.target,
                    frozenset(p for p in m.properties if not isinstance(p, ImageRank)) | {ImageRank(r)},
                    m.name,
                )
                for m, r in zip(self.maps, image_ranks)
            )
        return HexagonInstance(nodes, maps)

    def to_json(self) -> dict:
        def prop(p):
            return {"image_rank": p.rank} if isinstance(p, ImageRank) else p

        return {
            "nodes": [{"name": n.name, "rank": n.rank} for n in self.nodes],
            "maps": [
                {"name": m.name, "from": m.source, "to": m.target, "properties": sorted(map(prop, m.properties), key=str)}
                for m in self.maps
            ],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> HexagonInstance:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            nodes = [NodeSpec(d["name"], d.get("rank"), d.get("torsion_free", True)) for d in data["nodes"]]
            maps = []
            for d in data["maps"]:
                props = set()
                for p in d.get("properties", []):
                    if isinstance(p, dict):
                        props.add(ImageRank(int(p["image_rank"])))
                    else:
                        props.add(str(p).lower())
                maps.append(MapAnnotation(d["from"], d["to"], frozenset(props), d.get("name", "")))
        except (KeyError, TypeError) as exc:
            raise InvalidHexagon(f"malformed hexagon JSON: {exc}") from None
        return cls(tuple(nodes), tuple(maps))


@dataclass
class HexagonSolution:
    status: str  # "solved" | "underdetermined" | "inconsistent"
    ranks: dict[str, int] = field(default_factory=dict)
    image_ranks: dict[str, int] = field(default_factory=dict)
    free_parameters: list[str] = field(default_factory=list)
    dimension: int = 0
    solutions: list[dict[str, int]] = field(default_factory=list)
    unbounded: bool = False
    violated: str = ""
    trace: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.status == "solved":
            out.update(self.ranks)
            out["ranks"] = self.ranks
            out["image_ranks"] = self.image_ranks
        elif self.status == "underdetermined":
            out["free_parameters"] = self.free_parameters
            out["dimension"] = self.dimension
            out["unbounded"] = self.unbounded
            out["solutions"] = self.solutions
        else:
            out["violated"] = self.violated
        out["trace"] = self.trace
        return out


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of the augmented matrix (last column is the constant)."""
    rows = [r[:] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def solve(hex: HexagonInstance) -> HexagonSolution:
    names = [n.name for n in hex.nodes]
    var_names = [f"rank {n}" for n in names] + [f"im {m.label}" for m in hex.maps]
    nvar = 12

    def node(i):
        return i % 6

    def img(i):
        return 6 + i % 6

    equations: list[tuple[dict[int, int], int, str]] = []
    for i in range(6):
        equations.append(({node(i): 1, img(i - 1): -1, img(i): -1}, 0, f"exactness at {names[i]}"))
    for i, n in enumerate(hex.nodes):
        if n.rank is not None:
            equations.append(({node(i): 1}, n.rank, f"given rank {n.name} = {n.rank}"))
        if n.rank == 0:
            # 0 <= r <= rank forces both incident image ranks to vanish
            equations.append(({img(i - 1): 1}, 0, f"{hex.maps[i - 1].label} lands in a rank-0 group"))
            equations.append(({img(i): 1}, 0, f"{hex.maps[i].label} leaves a rank-0 group"))
    for i, m in enumerate(hex.maps):
        if ZERO in m.properties:
            equations.append(({img(i): 1}, 0, f"{m.label} is zero"))
        if INJECTIVE in m.properties:
            equations.append(({img(i): 1, node(i): -1}, 0, f"{m.label} is injective"))
        if SURJECTIVE in m.properties:
            equations.append(({img(i): 1, node(i + 1): -1}, 0, f"{m.label} is surjective"))
        if m.image_rank is not None:
            equations.append(({img(i): 1}, m.image_rank, f"{m.label} has image rank {m.image_rank}"))

    trace = [e[2] for e in equations]

    # fast path: propagate equations with a single unknown around the cycle
    known: dict[int, int] = {}
    changed = True
    while changed:
        changed = False
        for coeffs, const, why in equations:
            unknown = [j for j in coeffs if j not in known]
            rest = const - sum(c * known[j] for j, c in coeffs.items() if j in known)
            if not unknown:
                if rest:
                    return HexagonSolution("inconsistent", violated=why, trace=trace)
            elif len(unknown) == 1:
                j = unknown[0]
                val, rem = divmod(rest, coeffs[j])
                if rem or val < 0:
                    return HexagonSolution("inconsistent", violated=f"{why} forces {var_names[j]} = {Fraction(rest, coeffs[j])}", trace=trace)
                known[j] = val
                trace.append(f"{why} => {var_names[j]} = {val}")
                changed = True
    if len(known) == nvar:
        x = [known[j] for j in range(nvar)]
        for i in range(6):
            if x[img(i)] > min(x[node(i)], x[node(i + 1)]):
                return HexagonSolution(
                    "inconsistent", violated=f"image of {hex.maps[i].label} exceeds its source or target rank", trace=trace
                )
        ranks = {names[i]: x[node(i)] for i in range(6)}
        assert sum((-1) ** i * x[node(i)] for i in range(6)) == 0, "Euler characteristic"
        return HexagonSolution("solved", ranks, {hex.maps[i].label: x[img(i)] for i in range(6)}, trace=trace)

    rows = []
    for coeffs, const, _ in equations:
        row = [Fraction(0)] * (nvar + 1)
        for j, c in coeffs.items():
            row[j] += c
        row[nvar] = Fraction(const)
        rows.append(row)
    rref, pivots = _rref(rows, nvar)
    for row in rref:
        if all(x == 0 for x in row[:nvar]) and row[nvar] != 0:
            return HexagonSolution("inconsistent", violated="linear rank equations have no solution", trace=trace)
    free = [j for j in range(nvar) if j not in pivots]

    def assignment(params: Sequence[int]) -> list[Fraction]:
        x = [Fraction(0)] * nvar
        for j, v in zip(free, params):
            x[j] = Fraction(v)
        for row, c in zip(rref, pivots):
            x[c] = row[nvar] - sum(row[j] * x[j] for j in free)
        return x

    def feasible(x: list[Fraction]) -> str:
        for j, v in enumerate(x):
            if v.denominator != 1:
                return f"{var_names[j]} = {v} is not an integer"
            if v < 0:
                return f"{var_names[j]} = {v} is negative"
        for i in range(6):
            if x[img(i)] > x[node(i)] or x[img(i)] > x[node(i + 1)]:
                return f"image of {hex.maps[i].label} exceeds its source or target rank"
        return ""

    known = [n.rank for n in hex.nodes if n.rank is not None]
    bound = 2 * max(known, default=0) + 1
    sols = []
    unbounded = False
    last_violation = ""
    for params in itertools.product(range(bound + 1), repeat=len(free)):
        x = assignment(params)
        why = feasible(x)
        if why:
            last_violation = why
            continue
        if any(v >= bound for v in x):
            unbounded = True
        sols.append([int(v) for v in x])
    if not sols:
        return HexagonSolution("inconsistent", violated=last_violation or "no feasible ranks", trace=trace)

    def as_dicts(x):
        return (
            {names[i]: x[node(i)] for i in range(6)},
            {hex.maps[i].label: x[img(i)] for i in range(6)},
        )

    if len(sols) == 1 and not unbounded:
        ranks, images = as_dicts(sols[0])
        assert sum((-1) ** i * ranks[names[i]] for i in range(6)) == 0, "Euler characteristic"
        return HexagonSolution("solved", ranks, images, trace=trace)

    varying = [j for j in range(nvar) if len({s[j] for s in sols}) > 1]
    base = sols[0]
    diffs = [[Fraction(s[j] - base[j]) for j in range(nvar)] + [Fraction(0)] for s in sols[1:]]
    dim = len(_rref(diffs, nvar)[1]) if diffs else 0
    return HexagonSolution(
        "underdetermined",
        free_parameters=[var_names[j] for j in varying],
        dimension=dim if not unbounded else len(free),
        solutions=[{**as_dicts(s)[0]} for s in sols],
        unbounded=unbounded,
        trace=trace,
    )


def verify_exactness(hex: HexagonInstance) -> bool:
    """All ranks and image ranks given: check n_i = r_{i-1} + r_i and the bounds."""
    n = [node.rank for node in hex.nodes]
    r = [m.image_rank for m in hex.maps]
    if any(x is None for x in n + r):
        raise InvalidHexagon("verify_exactness needs every rank and image rank")
    for i in range(6):
        if n[i] != r[i - 1] + r[i]:
            return False
        if r[i] > n[i] or r[i] > n[(i + 1) % 6]:
            return False
        m = hex.maps[i]
        if ZERO in m.properties and r[i] != 0:
            return False
        if INJECTIVE in m.properties and r[i] != n[i]:
            return False
        if SURJECTIVE in m.properties and r[i] != n[(i + 1) % 6]:
            return False
    return True


def solved_instance(hex: HexagonInstance, sol: HexagonSolution) -> HexagonInstance:
    return hex.with_ranks(sol.ranks, [sol.image_ranks[m.label] for m in hex.maps])


def pq_instance(delta0_surjective: bool = True) -> HexagonInstance:
    """Generic orbit plus the periodic orbits C_p, C_q, C_inf.

    B = A_p ⊕ A_q ⊕ A_inf, so K0(B) = Z ⊕ Z ⊕ Z^2 and K1(B) = Z ⊕ Z ⊕ 0.
    """
    nodes = (
        NodeSpec("K0(A_empty)", 0),
        NodeSpec("K0(A)"),
        NodeSpec("K0(B)", 1 + 1 + 2),
        NodeSpec("K1(A_empty)", 1),
        NodeSpec("K1(A)"),
        NodeSpec("K1(B)", 1 + 1 + 0),
    )
    names = [n.name for n in nodes]
    labels = ["iota0", "rho0", "delta0", "iota1", "rho1", "delta1"]
    maps = []
    for i, label in enumerate(labels):
        props = frozenset({SURJECTIVE}) if label == "delta0" and delta0_surjective else frozenset()
        maps.append(MapAnnotation(names[i], names[(i + 1) % 6], props, label))
    return HexagonInstance(nodes, tuple(maps))


def load_instance(spec: str) -> HexagonInstance:
    if spec == "paper-pq":
        return pq_instance()
    if spec.lstrip().startswith("{"):
        return HexagonInstance.from_json(spec)
    with open(spec) as fh:
        return HexagonInstance.from_json(fh.read())
