"""Host (hyper)graphs on [n], random models, and the two-model comparison.

Random hosts come from the independent-edge model (each k-set kept with
probability p) or the fixed-size model (a uniform M-subset of all k-sets).
All sampling is deterministic in the seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

from .errors import InputError
from .pattern import PatternGraph
from .rng import derive_seed, rng_for

MAX_HOST_VERTICES_SAMPLING = 10_000


@dataclass(frozen=True)
class HostGraph:
    """A k-uniform host on vertices 0..n-1; edges are sorted vertex tuples."""

    k: int
    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.k < 2:
            raise InputError(f"edge arity must be at least 2, got {self.k}")
        if self.n < 0:
            raise InputError("vertex count must be nonnegative")
        normalized = []
        for e in self.edges:
            e = tuple(sorted(e))
            if len(e) != self.k or len(set(e)) != self.k:
                raise InputError(f"edge {e} is not a {self.k}-subset")
            if e and (e[0] < 0 or e[-1] >= self.n):
                raise InputError(f"edge {e} has a vertex outside 0..{self.n - 1}")
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
    def incidence(self) -> dict[int, tuple[tuple[int, ...], ...]]:
        inc: dict[int, list] = {x: [] for x in range(self.n)}
        for e in self.edges:
            for x in e:
                inc[x].append(e)
        return {x: tuple(es) for x, es in inc.items()}

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbor bitmasks; only meaningful for k=2."""
        adj = [0] * self.n
        if self.k == 2:
            for a, b in self.edges:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
        return tuple(adj)

    def has_edge(self, e) -> bool:
        return frozenset(e) in self.edge_set

    def without_edge(self, e) -> "HostGraph":
        key = tuple(sorted(e))
        if not self.has_edge(key):
            raise InputError(f"edge {key} not present")
        return HostGraph(self.k, self.n, tuple(x for x in self.edges if x != key))


@dataclass(frozen=True)
class EdgeOrdering:
    """A uniform random ordering of every possible k-edge on [n]."""

    k: int
    n: int
    seed: int
    sequence: tuple[tuple[int, ...], ...]


def host_from_edges(k: int, n: int, edges) -> HostGraph:
    return HostGraph(k=k, n=n, edges=tuple(tuple(e) for e in edges))


def complete_host(k: int, n: int) -> HostGraph:
    return host_from_edges(k, n, itertools.combinations(range(n), k))


def parse_host(text: str) -> HostGraph:
    """Host file format: identical to the pattern format with n in the header."""
    from .pattern import _parse_edge, _parse_int, _split_header

    header, lines = _split_header(text)
    if header[0] == "graph" and len(header) == 2:
        k, n = 2, _parse_int(header[1])
    elif header[0] == "hypergraph" and len(header) == 3:
        k, n = _parse_int(header[1]), _parse_int(header[2])
    else:
        raise InputError("header must be 'graph <n>' or 'hypergraph <k> <n>'")
    return host_from_edges(k, n, [_parse_edge(line, k) for line in lines])


def total_edges(k: int, n: int) -> int:
    return math.comb(n, k)


def unrank_edge(index: int, n: int, k: int) -> tuple[int, ...]:
    """The index-th k-subset of range(n) in lexicographic order."""
    combo = []
    x = 0
    for j in range(k, 0, -1):
        while math.comb(n - x - 1, j - 1) <= index:
            index -= math.comb(n - x - 1, j - 1)
            x += 1
        combo.append(x)
        x += 1
    return tuple(combo)


def _check_sampling_size(n: int, k: int) -> None:
    if n > MAX_HOST_VERTICES_SAMPLING:
        raise InputError(f"sampling is capped at n={MAX_HOST_VERTICES_SAMPLING}")
    if n < k:
        raise InputError(f"need n >= k, got n={n}, k={k}")


def sample_gnp(k: int, n: int, p: float, seed: int) -> HostGraph:
    """Independent-edge random host; identical (k, n, p, seed) gives an identical graph."""
    _check_sampling_size(n, k)
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    total = total_edges(k, n)
    rng = rng_for(seed)
    if p >= 1.0:
        return complete_host(k, n)
    if p <= 0.0:
        return host_from_edges(k, n, [])
    # geometric skipping: gaps between kept indices are iid Geometric(p)
    log_q = math.log1p(-p)
    edges = []
    i = -1
    while True:
        i += 1 + int(math.log(1.0 - rng.random()) / log_q)
        if i >= total:
            break
        edges.append(unrank_edge(i, n, k))
    return host_from_edges(k, n, edges)


def sample_gnm(k: int, n: int, m_edges: int, seed: int) -> HostGraph:
    """Uniform host with exactly m_edges edges."""
    _check_sampling_size(n, k)
    total = total_edges(k, n)
    if not 0 <= m_edges <= total:
        raise InputError(f"edge count {m_edges} out of range 0..{total}")
    rng = rng_for(seed)
    chosen = rng.sample(range(total), m_edges)
    return host_from_edges(k, n, [unrank_edge(i, n, k) for i in chosen])


def random_ordering(k: int, n: int, seed: int) -> EdgeOrdering:
    """Uniform random permutation of the complete edge list."""
    if n < k:
        raise InputError(f"need n >= k, got n={n}, k={k}")
    rng = rng_for(seed)
    seq = list(itertools.combinations(range(n), k))
    rng.shuffle(seq)
    return EdgeOrdering(k=k, n=n, seed=seed, sequence=tuple(seq))


def _factor_sample_worker(payload) -> bool:
    pattern, n, mode, param, seed = payload
    from .factor import has_factor

    if mode == "p":
        g = sample_gnp(pattern.k, n, param, seed)
    else:
        g = sample_gnm(pattern.k, n, param, seed)
    return has_factor(pattern, g)


def compare_models(
    pattern: PatternGraph,
    n: int,
    p: float,
    trials: int,
    seed: int,
    sweep: bool = False,
    workers: int = 1,
) -> dict:
    """Estimate Pr(host has a factor) under both random models.

    The fixed-size model uses M = round(total * p) (Python rounding, half to
    even); the convention is documented here and irrelevant at test
    tolerances.  With ``sweep`` the fixed-size estimate is repeated at half
    and double M.
    """
    from .parallel import run_trials

    if n % pattern.v:
        raise InputError(f"n={n} is not divisible by pattern size {pattern.v}")
    if trials < 1:
        raise InputError("need at least one trial")
    total = total_edges(pattern.k, n)
    m_edges = round(total * p)

    def estimate(mode: str, param, stream: int) -> tuple[float, float]:
        payloads = [
            (pattern, n, mode, param, derive_seed(seed, stream, t))
            for t in range(trials)
        ]
        hits = sum(run_trials(_factor_sample_worker, payloads, workers))
        est = hits / trials
        return est, math.sqrt(est * (1.0 - est) / trials)

    est_p, se_p = estimate("p", p, 0)
    est_m, se_m = estimate("m", m_edges, 1)
    report = {
        "n": n,
        "p": p,
        "m_edges": m_edges,
        "trials": trials,
        "seed": seed,
        "pr_gnp": est_p,
        "se_gnp": se_p,
        "pr_gnm": est_m,
        "se_gnm": se_m,
        "difference": est_p - est_m,
        "combined_se": math.sqrt(se_p**2 + se_m**2),
    }
    if sweep:
        rows = []
        for j, m_alt in enumerate(sorted({max(0, m_edges // 2), m_edges, min(total, 2 * m_edges)})):
            est, se = estimate("m", m_alt, 2 + j)
            rows.append({"m_edges": m_alt, "pr_gnm": est, "se_gnm": se})
        report["sweep"] = rows
    return report
