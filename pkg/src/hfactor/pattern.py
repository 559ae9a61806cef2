"""Fixed patterns (graphs or k-uniform hypergraphs) and their density analytics.

A pattern lives on vertices 0..v-1 with edges that are k-subsets.  Densities
are exact rationals so balance classification never hinges on float ties.
Everything here is exhaustive enumeration; patterns are capped at 12 vertices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property

from .errors import InputError

MAX_PATTERN_VERTICES = 12


class Balance(Enum):
    STRICTLY_BALANCED = "strictly_balanced"
    BALANCED_NOT_STRICT = "balanced_not_strict"
    UNBALANCED = "unbalanced"


@dataclass(frozen=True)
class PatternGraph:
    """Pattern with edge arity ``k``, vertex count ``v`` and a nonempty edge set.

    ``edges`` is normalized to a sorted tuple of sorted vertex tuples.
    """

    k: int
    v: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 2:
            raise InputError(f"edge arity must be at least 2, got {self.k}")
        if self.v < self.k:
            raise InputError(f"need at least k={self.k} vertices, got {self.v}")
        if self.v > MAX_PATTERN_VERTICES:
            raise InputError(
                f"pattern has {self.v} vertices; exhaustive analytics are capped "
                f"at {MAX_PATTERN_VERTICES}"
            )
        if not self.edges:
            raise InputError("pattern must have at least one edge")
        normalized = []
        for e in self.edges:
            e = tuple(sorted(e))
            if len(e) != self.k or len(set(e)) != self.k:
                raise InputError(f"edge {e} is not a {self.k}-subset")
            if e[0] < 0 or e[-1] >= self.v:
                raise InputError(f"edge {e} has a vertex outside 0..{self.v - 1}")
            normalized.append(e)
        normalized.sort()
        for a, b in zip(normalized, normalized[1:]):
            if a == b:
                raise InputError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(e) for e in self.edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.v
        for e in self.edges:
            for x in e:
                deg[x] += 1
        return tuple(deg)

    def is_complete_graph(self) -> bool:
        return self.k == 2 and self.m == math.comb(self.v, 2)

    def is_single_edge(self) -> bool:
        return self.m == 1 and self.v == self.k


@dataclass(frozen=True)
class DensityReport:
    """Density and symmetry summary of one pattern.

    per_vertex maps each vertex to (local max density, fewest edges among
    subpatterns attaining that density at the vertex).
    """

    density: Fraction
    max_density: Fraction
    per_vertex: dict[int, tuple[Fraction, int]]
    critical_edge_count: int
    balance: Balance
    automorphism_count: int


def pattern_from_edges(k: int, v: int, edges) -> PatternGraph:
    return PatternGraph(k=k, v=v, edges=tuple(tuple(e) for e in edges))


def complete_pattern(v: int) -> PatternGraph:
    return pattern_from_edges(2, v, itertools.combinations(range(v), 2))


def single_edge_pattern(k: int) -> PatternGraph:
    return pattern_from_edges(k, k, [tuple(range(k))])


def path_pattern(v: int) -> PatternGraph:
    return pattern_from_edges(2, v, [(i, i + 1) for i in range(v - 1)])


def cycle_pattern(v: int) -> PatternGraph:
    return pattern_from_edges(2, v, [(i, (i + 1) % v) for i in range(v)])


def parse_pattern(text: str) -> PatternGraph:
    """Parse the pattern file format.

    Line 1 is ``graph <v>`` or ``hypergraph <k> <v>``; every following
    nonblank line is one edge given as k vertex indices (0-based).  Lines
    starting with ``#`` are comments.
    """
    header, lines = _split_header(text)
    if header[0] == "graph":
        if len(header) != 2:
            raise InputError("header must be 'graph <v>'")
        k, v = 2, _parse_int(header[1])
    elif header[0] == "hypergraph":
        if len(header) != 3:
            raise InputError("header must be 'hypergraph <k> <v>'")
        k, v = _parse_int(header[1]), _parse_int(header[2])
    else:
        raise InputError(f"unknown header kind {header[0]!r}")
    edges = [_parse_edge(line, k) for line in lines]
    if not edges:
        raise InputError("pattern file declares no edges")
    return pattern_from_edges(k, v, edges)


def _split_header(text: str) -> tuple[list[str], list[str]]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InputError("empty file")
    return lines[0].split(), lines[1:]


def _parse_int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"expected an integer, got {tok!r}") from None


def _parse_edge(line: str, k: int) -> tuple[int, ...]:
    toks = line.split()
    if len(toks) != k:
        raise InputError(f"edge line {line!r} does not have {k} vertices")
    return tuple(_parse_int(t) for t in toks)


def density(p: PatternGraph) -> Fraction:
    """Edge count over vertex count minus one, as an exact rational."""
    if p.v < 2:
        raise InputError("density needs at least two vertices")
    return Fraction(p.m, p.v - 1)


def density_profile(p: PatternGraph) -> DensityReport:
    """Exhaustive local/global density maxima over induced subpatterns.

    Enumerating induced subpatterns suffices: dropping edges at a fixed
    vertex set only lowers the density, so every density maximizer is the
    induced subpattern on its vertex set.  The test suite double-checks this
    reduction against an all-subgraph oracle.
    """
    d = density(p)
    best: list[Fraction | None] = [None] * p.v
    fewest: list[int | None] = [None] * p.v
    max_density = Fraction(0)
    proper_max = Fraction(0)
    for size in range(2, p.v + 1):
        for subset in itertools.combinations(range(p.v), size):
            sset = set(subset)
            e_in = sum(1 for e in p.edges if sset.issuperset(e))
            d_sub = Fraction(e_in, size - 1)
            max_density = max(max_density, d_sub)
            if size < p.v:
                proper_max = max(proper_max, d_sub)
            for x in subset:
                if best[x] is None or d_sub > best[x]:
                    best[x] = d_sub
                    fewest[x] = e_in
                elif d_sub == best[x] and e_in < fewest[x]:
                    fewest[x] = e_in
    per_vertex = {x: (best[x], fewest[x]) for x in range(p.v)}
    if proper_max < d:
        balance = Balance.STRICTLY_BALANCED
    elif max_density == d:
        balance = Balance.BALANCED_NOT_STRICT
    else:
        balance = Balance.UNBALANCED
    return DensityReport(
        density=d,
        max_density=max_density,
        per_vertex=per_vertex,
        critical_edge_count=max(fewest[x] for x in range(p.v)),
        balance=balance,
        automorphism_count=automorphism_count(p),
    )


def balance_class(p: PatternGraph) -> Balance:
    return density_profile(p).balance


def automorphism_count(p: PatternGraph) -> int:
    """Number of vertex permutations mapping the edge set onto itself.

    Backtracking over images with degree pruning; a bijection maps the edge
    set into itself iff onto, so only the forward check is needed.
    """
    deg = p.degrees
    edge_set = p.edge_set
    # edges checkable once their largest vertex is placed
    by_max = [[] for _ in range(p.v)]
    for e in p.edges:
        by_max[max(e)].append(e)
    image = [-1] * p.v
    used = [False] * p.v
    count = 0

    def place(i: int) -> None:
        nonlocal count
        if i == p.v:
            count += 1
            return
        for c in range(p.v):
            if used[c] or deg[c] != deg[i]:
                continue
            image[i] = c
            ok = all(
                frozenset(image[x] for x in e) in edge_set for e in by_max[i]
            )
            if ok:
                used[c] = True
                place(i + 1)
                used[c] = False
        image[i] = -1

    place(0)
    return count
