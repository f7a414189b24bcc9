"""Uniform hypergraphs, partial hypergraphs, and the tent constructions.

Vertices are dense 0-indexed integers.  All values are immutable after
construction; every function here is pure.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Edge = tuple[int, ...]


def _canon_edges(edges: Iterable[Iterable[int]]) -> frozenset[Edge]:
    return frozenset(tuple(sorted(e)) for e in edges)


@dataclass(frozen=True)
class Hypergraph:
    """An r-uniform hypergraph on vertices 0..n-1."""

    r: int
    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"uniformity must be >= 2, got {self.r}")
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        object.__setattr__(self, "edges", _canon_edges(self.edges))
        for e in self.edges:
            if len(e) != self.r or len(set(e)) != self.r:
                raise ValueError(f"edge {e} is not an {self.r}-set")
            if e[0] < 0 or e[-1] >= self.n:
                raise ValueError(f"edge {e} has vertices outside [0, {self.n})")

    @property
    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def to_json(self) -> str:
        return json.dumps(
            {"r": self.r, "n": self.n, "edges": [list(e) for e in self.sorted_edges]},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Hypergraph":
        d = json.loads(text)
        return cls(r=d["r"], n=d["n"], edges=d["edges"])


@dataclass(frozen=True)
class PartialHypergraph:
    """A simplicial complex with edges of size <= r, stored by its maximal edges.

    The downward closure is implicit and never materialized.
    """

    r: int
    n: int
    maximal_edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"edge-size cap must be >= 2, got {self.r}")
        object.__setattr__(self, "maximal_edges", _canon_edges(self.maximal_edges))
        for e in self.maximal_edges:
            if not 1 <= len(e) <= self.r or len(set(e)) != len(e):
                raise ValueError(f"edge {e} must be a set of size 1..{self.r}")
            if e[0] < 0 or e[-1] >= self.n:
                raise ValueError(f"edge {e} has vertices outside [0, {self.n})")
        for a, b in itertools.permutations(self.maximal_edges, 2):
            if set(a) <= set(b):
                raise ValueError(f"maximal edges must form an antichain: {a} <= {b}")

    @property
    def sorted_edges(self) -> list[Edge]:
        return sorted(self.maximal_edges)


@dataclass(frozen=True)
class TentSpec:
    """A partition of r with largest part < r, describing a generalized tent."""

    lam: tuple[int, ...]

    def __post_init__(self):
        lam = tuple(self.lam)
        object.__setattr__(self, "lam", lam)
        if len(lam) < 2:
            raise ValueError("partition needs at least two parts")
        if any(p < 1 for p in lam):
            raise ValueError("partition entries must be positive")
        if any(a < b for a, b in zip(lam, lam[1:])):
            raise ValueError("partition entries must be weakly decreasing")
        if lam[0] >= sum(lam):
            raise ValueError("largest part must be strictly less than the total")

    @property
    def r(self) -> int:
        return sum(self.lam)

    @property
    def m(self) -> int:
        return len(self.lam)


@dataclass(frozen=True)
class Family:
    """A nonempty list of hypergraphs sharing one uniformity."""

    members: tuple[Hypergraph, ...]

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("family must be nonempty")
        if len({h.r for h in members}) != 1:
            raise ValueError("family members must share the same uniformity")

    @property
    def r(self) -> int:
        return self.members[0].r


def make_tent(r: int, i: int) -> Hypergraph:
    """The three-edge tent with base/apex intersection pattern (r-i, i).

    Lives on 2r-1 vertices; the three pairwise edge intersections have
    sizes i, r-i and 1.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    if not 1 <= i <= r // 2:
        raise ValueError(f"i must lie in [1, {r // 2}], got {i}")
    base = tuple(range(r))
    left = tuple(range(i)) + tuple(range(r, 2 * r - i - 1)) + (2 * r - 2,)
    right = tuple(range(i, r)) + tuple(range(2 * r - i - 1, 2 * r - 1))
    return Hypergraph(r=r, n=2 * r - 1, edges=[base, left, right])


def make_general_tent(spec: TentSpec) -> Hypergraph:
    """Tent for an arbitrary partition: one base edge split into parts, each
    part extended through a common apex by fresh vertices."""
    r, m = spec.r, spec.m
    apex = r
    fresh = itertools.count(r + 1)
    edges = [tuple(range(r))]
    start = 0
    for lam_i in spec.lam:
        part = tuple(range(start, start + lam_i))
        start += lam_i
        extra = tuple(next(fresh) for _ in range(r - lam_i - 1))
        edges.append(part + (apex,) + extra)
    n = r + 1 + m * (r - 1) - r  # = m*(r-1) + 1
    return Hypergraph(r=r, n=n, edges=edges)


def make_partial_tent(r: int, i: int) -> PartialHypergraph:
    """Partial tent on r+1 vertices whose extension is the (r-i, i)-tent."""
    if r < 2:
        raise ValueError("r must be >= 2")
    if not 1 <= i <= r // 2:
        raise ValueError(f"i must lie in [1, {r // 2}], got {i}")
    base = tuple(range(r))
    left = tuple(range(i)) + (r,)
    right = tuple(range(i, r)) + (r,)
    return PartialHypergraph(r=r, n=r + 1, maximal_edges=[base, left, right])


def extend(F: PartialHypergraph) -> Hypergraph:
    """Pad each maximal edge to size r with fresh vertices, never shared."""
    fresh = itertools.count(F.n)
    edges = []
    for e in F.sorted_edges:
        pad = tuple(next(fresh) for _ in range(F.r - len(e)))
        edges.append(e + pad)
    n = F.n + sum(F.r - len(e) for e in F.maximal_edges)
    return Hypergraph(r=F.r, n=n, edges=edges)


def turan_parts(r: int, n: int) -> list[list[int]]:
    """Balanced partition of 0..n-1 into r parts, vertex v in part v mod r."""
    return [[v for v in range(n) if v % r == p] for p in range(r)]


def make_turan_graph(r: int, n: int) -> Hypergraph:
    """Balanced complete r-partite r-uniform hypergraph on n vertices."""
    if n < r:
        raise ValueError(f"need n >= r, got n={n}, r={r}")
    parts = turan_parts(r, n)
    edges = [tuple(sorted(t)) for t in itertools.product(*parts)]
    return Hypergraph(r=r, n=n, edges=edges)


def tent_family(r: int, k: int) -> Family:
    """The family of the k widest tents for uniformity r."""
    if not 1 <= k <= r // 2:
        raise ValueError(f"k must lie in [1, {r // 2}], got {k}")
    return Family(tuple(make_tent(r, i) for i in range(1, k + 1)))


def blowup(H: Hypergraph, sizes: Sequence[int]) -> Hypergraph:
    """Replace vertex v by sizes[v] clones; an r-set of clones is an edge iff
    its projection is an edge of H on distinct base vertices."""
    if len(sizes) != H.n:
        raise ValueError(f"need {H.n} sizes, got {len(sizes)}")
    if any(s < 1 for s in sizes):
        raise ValueError("all blowup sizes must be >= 1")
    offset = [0] * H.n
    total = 0
    for v in range(H.n):
        offset[v] = total
        total += sizes[v]
    clones = [range(offset[v], offset[v] + sizes[v]) for v in range(H.n)]
    edges = []
    for e in H.edges:
        for choice in itertools.product(*(clones[v] for v in e)):
            edges.append(tuple(sorted(choice)))
    return Hypergraph(r=H.r, n=total, edges=edges)


def is_two_covered(H: Hypergraph) -> bool:
    """True iff every vertex pair lies in at least one edge."""
    covered = set()
    for e in H.edges:
        covered.update(itertools.combinations(e, 2))
    return len(covered) == H.n * (H.n - 1) // 2


def is_L_intersecting(H: Hypergraph, L: Iterable[int]) -> bool:
    """True iff every pair of distinct edges meets in a size listed in L."""
    allowed = set(L)
    if not all(0 <= s < H.r for s in allowed):
        raise ValueError(f"intersection sizes must lie in [0, {H.r})")
    for a, b in itertools.combinations(H.edges, 2):
        if len(set(a) & set(b)) not in allowed:
            return False
    return True


def is_T_rk_triple(A: Iterable[int], B: Iterable[int], C: Iterable[int],
                   r: int, k: int) -> bool:
    """Triangle-like triple test: A inside B|C, B&C sticks out of A, and A
    shares at least r-k vertices with B."""
    A, B, C = set(A), set(B), set(C)
    if not (len(A) == len(B) == len(C) == r):
        raise ValueError("all three edges must have exactly r vertices")
    if A == B or A == C or B == C:
        raise ValueError("edges must be pairwise distinct")
    return A <= (B | C) and bool((B & C) - A) and len(A & B) >= r - k


def contains_T_rk_triple(H: Hypergraph, k: int) -> bool:
    """Whether some ordered triple of distinct edges of H forms a triple."""
    for A, B, C in itertools.permutations(H.edges, 3):
        if is_T_rk_triple(A, B, C, H.r, k):
            return True
    return False


def random_hypergraph(r: int, n: int, p: float, rng) -> Hypergraph:
    """Binomial random r-graph: each r-set kept independently with prob p."""
    edges = [e for e in itertools.combinations(range(n), r) if rng.random() < p]
    return Hypergraph(r=r, n=n, edges=edges)
