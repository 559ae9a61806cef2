"""Multilinear copy-counting polynomials over independent edge indicators.

A copy polynomial is determined implicitly by (pattern, host size, anchor):
its terms are the edge images of the anchored injections, never an explicit
coefficient map.  Derivative expectations are computed by enumerating the
injections once and histogramming subsets of their edge images.

Two bases are supported.  The injection basis keeps one term per injection
(coefficients can exceed 1 where injections share an edge image, so the
polynomial is bounded-coefficient rather than max-coefficient-1); with
``collapse`` each distinct edge image counts once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from collections import defaultdict

from .errors import InputError
from .embed import ConstraintSpec, full_constraint, constrained_count
from .host import HostGraph, complete_host, sample_gnp
from .pattern import PatternGraph
from .rng import derive_seed

DEFAULT_WORK_CAP = 5_000_000
THEOREMS = ("all-order", "absolute-low-order", "relative-low-order", "upper-tail", "nonconstant-relative", "nonconstant-upper-tail", "small-ceiling")


@dataclass(frozen=True)
class CopyPolynomial:
    pattern: PatternGraph
    n: int
    anchor: ConstraintSpec | None = None
    collapse: bool = False

    def __post_init__(self):
        if self.n < self.pattern.v:
            raise InputError(f"need n >= {self.pattern.v}, got {self.n}")

    @property
    def spec(self) -> ConstraintSpec:
        return self.anchor if self.anchor is not None else full_constraint(self.pattern)

    @property
    def degree(self) -> int:
        return len(self.spec.constrained_edges)


def _anchored_injections(f: CopyPolynomial):
    """Yield (injection as dict over constrained vertices, edge image frozenset)."""
    spec = f.spec
    pins = dict(spec.pins)
    constrained = set(pins)
    for e in spec.constrained_edges:
        constrained.update(e)
    free_slots = sorted(constrained - set(pins))
    hosts = [x for x in range(f.n) if x not in set(pins.values())]
    for choice in itertools.permutations(hosts, len(free_slots)):
        img = dict(pins)
        img.update(zip(free_slots, choice))
        edge_image = frozenset(
            tuple(sorted(img[x] for x in e)) for e in spec.constrained_edges
        )
        yield img, edge_image


def _term_multiplier(f: CopyPolynomial) -> int:
    """Injections of unconstrained pattern vertices, a plain falling factorial."""
    spec = f.spec
    constrained = set(spec.pinned_vertices)
    for e in spec.constrained_edges:
        constrained.update(e)
    return math.perm(f.n - len(constrained), f.pattern.v - len(constrained))


def _check_work(f: CopyPolynomial, work_cap: int) -> None:
    spec = f.spec
    constrained = set(spec.pinned_vertices)
    for e in spec.constrained_edges:
        constrained.update(e)
    work = math.perm(f.n, len(constrained) - len(spec.pins)) * 2**f.degree
    if work > work_cap:
        raise InputError(
            f"derivative enumeration needs about {work} steps, over the cap {work_cap}"
        )


def _edge_image_terms(f: CopyPolynomial) -> dict[frozenset, int]:
    """Coefficient of each full edge image (term of the polynomial)."""
    terms: dict[frozenset, int] = defaultdict(int)
    for _, edge_image in _anchored_injections(f):
        terms[edge_image] += 1
    mult = _term_multiplier(f)
    if f.collapse:
        return {u: 1 for u in terms} if mult > 0 else {}
    return {u: c * mult for u, c in terms.items()}


def expectation(f: CopyPolynomial, p: float) -> float:
    """Sum over terms of coefficient times p^degree."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    d = f.degree
    if f.collapse:
        return sum(_edge_image_terms(f).values()) * p**d
    return constrained_count(f.pattern, complete_host(f.pattern.k, f.n), f.spec) * p**d


def derivative_expectation(f: CopyPolynomial, fixed_edges, p: float) -> float:
    """Expectation of the partial derivative with respect to the given host edges."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    fixed = frozenset(tuple(sorted(e)) for e in fixed_edges)
    if len(fixed) > f.degree:
        raise InputError("more fixed edges than the polynomial degree")
    if not fixed:
        return expectation(f, p)
    hits = sum(
        c for u, c in _edge_image_terms(f).items() if fixed <= u
    )
    return hits * p ** (f.degree - len(fixed))


def derivative_profile(f: CopyPolynomial, p: float, work_cap: int = DEFAULT_WORK_CAP) -> dict:
    """Max derivative expectations by order, plus the below-degree ceiling.

    e_star is the max over all fixed edge sets of size < degree (the empty
    set included); eprime_max restricts to nonempty sets below the degree,
    which for a homogeneous polynomial is the nonconstant-part maximum.
    min_exponent reports min over nonempty fixed sets of size < degree of
    log(E/E_L) / log(n), the decay exponent of the derivative ratios; these
    sets span proper subpatterns, where the ratio is what balance controls.
    """
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    _check_work(f, work_cap)
    terms = _edge_image_terms(f)
    d = f.degree
    sub_counts: list[dict[frozenset, int]] = [dict() for _ in range(d + 1)]
    for u, c in terms.items():
        edges = sorted(u)
        for j in range(1, d + 1):
            bucket = sub_counts[j]
            for sub in itertools.combinations(edges, j):
                key = frozenset(sub)
                bucket[key] = bucket.get(key, 0) + c
    e0 = sum(terms.values()) * p**d
    e_by_order = {}
    max_coeff = max(terms.values(), default=0)
    for j in range(1, d + 1):
        best = max(sub_counts[j].values(), default=0)
        e_by_order[j] = best * p ** (d - j)
    e_star = max([e0] + [e_by_order[j] for j in range(1, d)], default=e0)
    eprime_max = max((e_by_order[j] for j in range(1, d)), default=0.0)
    min_exponent = None
    if e0 > 0 and f.n > 1:
        ratios = [
            e0 / (c * p ** (d - j))
            for j in range(1, d)
            for c in sub_counts[j].values()
        ]
        if ratios:
            min_exponent = math.log(min(ratios)) / math.log(f.n)
    return {
        "degree": d,
        "expectation": e0,
        "e_by_order": e_by_order,
        "e_star": e_star,
        "eprime_max": eprime_max,
        "normalization": max_coeff,
        "min_exponent": min_exponent,
    }


def hypothesis_check(
    f: CopyPolynomial,
    p: float,
    eps: float,
    theorem: str,
    omega_threshold: float | None = None,
    a_bound: float | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
) -> dict:
    """Evaluate the quantitative hypothesis of one concentration statement.

    The named checks, on the normalized polynomial (max coefficient 1):
    all-order needs E >= n^eps * max of every derivative order; the
    low-order pair bound orders 1..d-1, absolutely or relative to E, plus a
    growth floor on E; the nonconstant variants use the nonconstant-part
    maxima instead; the upper-tail pair asks a ceiling A to dominate the
    growth floor plus n^eps times those maxima; small-ceiling needs every
    quantity, E included, at most n^-eps.  Growth conditions of the
    omega(log n) kind are parameterized by omega_threshold (default
    10 * log n) since they are not decidable at a fixed n; reports carry the
    raw numbers either way.
    """
    if theorem not in THEOREMS:
        raise InputError(f"unknown theorem {theorem!r}; choose from {THEOREMS}")
    if eps <= 0:
        raise InputError("eps must be positive")
    prof = derivative_profile(f, p, work_cap=work_cap)
    n, d = f.n, prof["degree"]
    if omega_threshold is None:
        omega_threshold = 10.0 * math.log(n)
    norm = prof["normalization"] or 1
    e0 = prof["expectation"] / norm
    e_by = {j: prof["e_by_order"][j] / norm for j in prof["e_by_order"]}
    report = {
        "theorem": theorem,
        "eps": eps,
        "omega_threshold": omega_threshold,
        "normalization": norm,
        "expectation_normalized": e0,
        "e_by_order_normalized": e_by,
    }

    def ratio(num, den):
        return num / den if den > 0 else math.inf

    if theorem == "all-order":
        top = max((e_by[j] for j in range(1, d + 1)), default=0.0)
        report["binding_ratio"] = ratio(n**eps * top, e0)
        report["passes"] = e0 >= n**eps * top and top >= 0
    elif theorem == "absolute-low-order":
        top = max((e_by[j] for j in range(1, d)), default=0.0)
        report["binding_ratio"] = top * n**eps
        report["passes"] = e0 > omega_threshold and top <= n ** (-eps)
    elif theorem == "relative-low-order":
        top = max((e_by[j] for j in range(1, d)), default=0.0)
        report["binding_ratio"] = ratio(top, n ** (-eps) * e0)
        report["passes"] = e0 > omega_threshold and top <= n ** (-eps) * e0
    elif theorem == "upper-tail":
        a = a_bound if a_bound is not None else e0
        top = max((e_by[j] for j in range(1, d)), default=0.0)
        needed = omega_threshold + n**eps * top
        report["a_bound"] = a
        report["binding_ratio"] = ratio(needed, a)
        report["passes"] = e0 <= a and a >= needed
    elif theorem == "nonconstant-relative":
        top = prof["eprime_max"] / norm
        report["binding_ratio"] = ratio(top, n ** (-eps) * e0)
        report["passes"] = e0 > omega_threshold and top <= n ** (-eps) * e0
    elif theorem == "nonconstant-upper-tail":
        a = a_bound if a_bound is not None else e0
        top = prof["eprime_max"] / norm
        needed = omega_threshold + n**eps * top
        report["a_bound"] = a
        report["binding_ratio"] = ratio(needed, a)
        report["passes"] = e0 <= a and a >= needed
    else:  # small-ceiling: the ceiling includes the plain expectation
        top = max(e0, prof["eprime_max"] / norm)
        report["binding_ratio"] = top * n**eps
        report["passes"] = top <= n ** (-eps)
    return report


def evaluate(f: CopyPolynomial, g: HostGraph) -> int:
    """Exact value of the polynomial on a concrete host."""
    if g.n != f.n or g.k != f.pattern.k:
        raise InputError("host does not match the polynomial's shape")
    if not f.collapse:
        return constrained_count(f.pattern, g, f.spec)
    edge_set = g.edge_set
    seen = set()
    for _, edge_image in _anchored_injections(f):
        if edge_image not in seen and all(frozenset(e) in edge_set for e in edge_image):
            seen.add(edge_image)
    return len(seen)


def _trial_worker(payload) -> int:
    f, p, seed = payload
    return evaluate(f, sample_gnp(f.pattern.k, f.n, p, seed))


def concentration_trial(
    f: CopyPolynomial,
    p: float,
    trials: int,
    eps: float,
    seed: int,
    workers: int = 1,
) -> dict:
    """Sample hosts, evaluate the polynomial exactly, and report the tail."""
    from .parallel import run_trials

    if trials < 1:
        raise InputError("need at least one trial")
    if eps <= 0:
        raise InputError("eps must be positive")
    mean_expected = expectation(f, p)
    payloads = [(f, p, derive_seed(seed, t)) for t in range(trials)]
    values = run_trials(_trial_worker, payloads, workers)
    emp_mean = sum(values) / trials
    if mean_expected > 0:
        exceed = sum(1 for x in values if abs(x - mean_expected) > eps * mean_expected)
    else:
        exceed = sum(1 for x in values if x != 0)
    var = sum((x - emp_mean) ** 2 for x in values) / trials
    return {
        "trials": trials,
        "p": p,
        "eps": eps,
        "expectation": mean_expected,
        "empirical_mean": emp_mean,
        "empirical_sd": math.sqrt(var),
        "exceed_fraction": exceed / trials,
    }
