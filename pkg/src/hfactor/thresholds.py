"""Threshold formula evaluation and Monte Carlo threshold estimation.

The scan estimates the density at which an increasing property (factor
existence, vertex coverage, or role coverage) crosses a target probability,
by bisection with a fixed sample budget per probe, and compares it against
the closed-form prediction for the pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .factor import counting_cap, has_factor
from .host import HostGraph, sample_gnp
from .parallel import run_trials
from .pattern import PatternGraph, density_profile
from .rng import derive_seed

PROPERTIES = ("factor", "coverage", "role")


@dataclass(frozen=True)
class ThresholdEstimate:
    n: int
    p_half: float
    ci_low: float
    ci_high: float
    trials_per_probe: int
    formula_value: float
    ratio: float
    property_name: str
    seed: int
    probes: tuple[dict, ...]
    chain_violations: int


def formula_threshold(pattern: PatternGraph, n: int) -> dict:
    """Closed-form threshold scales at a concrete n.

    predicted: n^(-1/max_density) * (log n)^(1/critical_edge_count) when every
    vertex attains the global max local density, else n^(-1/max_density).
    general_lower_bound: n^(-1/max_density) always.  strictly_balanced_value:
    n^(-1/density) * (log n)^(1/m) for strictly balanced patterns, else None.
    """
    if n < pattern.v:
        raise InputError(f"need n >= {pattern.v}")
    prof = density_profile(pattern)
    d_star = prof.max_density
    uniform = all(local == d_star for local, _ in prof.per_vertex.values())
    base = n ** (-1.0 / float(d_star))
    if uniform:
        predicted = base * math.log(n) ** (1.0 / prof.critical_edge_count)
    else:
        predicted = base
    strict = None
    if prof.balance.value == "strictly_balanced":
        strict = n ** (-1.0 / float(prof.density)) * math.log(n) ** (1.0 / pattern.m)
    return {
        "n": n,
        "uniform_local_density": uniform,
        "predicted": predicted,
        "general_lower_bound": base,
        "strictly_balanced_value": strict,
        "max_density": prof.max_density,
        "critical_edge_count": prof.critical_edge_count,
    }


def coverage_check(pattern: PatternGraph, g: HostGraph) -> bool:
    """True iff every host vertex lies in at least one labeled copy."""
    from .embed import role_images

    covered = set()
    for s in role_images(pattern, g):
        covered |= s
    return len(covered) == g.n


def role_coverage_check(pattern: PatternGraph, g: HostGraph) -> bool:
    """Coverage plus every pattern role realized by at least n/v host vertices."""
    from .embed import role_images

    if g.n % pattern.v:
        raise InputError(f"n={g.n} is not divisible by pattern size {pattern.v}")
    quota = g.n // pattern.v
    realized = role_images(pattern, g)
    covered = set()
    for s in realized:
        covered |= s
    if len(covered) < g.n:
        return False
    return all(len(s) >= quota for s in realized)


def _holds(pattern: PatternGraph, g: HostGraph, property_name: str) -> bool:
    if property_name == "factor":
        return has_factor(pattern, g)
    if property_name == "coverage":
        return coverage_check(pattern, g)
    if property_name == "role":
        return role_coverage_check(pattern, g)
    raise InputError(f"unknown property {property_name!r}; choose from {PROPERTIES}")


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials <= 0:
        raise InputError("trials must be positive")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def threshold_scan(
    pattern: PatternGraph,
    n_list,
    trials: int,
    target: float = 0.5,
    seed: int = 0,
    property_name: str = "factor",
    rounds: int = 12,
    check_chain: bool = True,
    workers: int = 1,
) -> list[ThresholdEstimate]:
    """Bisection estimate of the density where Pr(property) crosses target.

    The bracket starts at [0, 1] (probability 0 and 1 by monotonicity of an
    increasing property); each round probes the midpoint with a fixed number
    of fresh samples.  With check_chain every sampled host is also tested for
    the implication chain factor => role coverage => coverage, and violations
    are counted (they indicate a bug, as the chain is a theorem).
    """
    if trials < 1:
        raise InputError("need at least one trial per probe")
    if rounds < 12:
        raise InputError("bisection needs at least 12 rounds")
    if not 0.0 < target < 1.0:
        raise InputError("target must be strictly between 0 and 1")
    estimates = []
    for n_index, n in enumerate(n_list):
        if property_name in ("factor", "role") and n % pattern.v:
            raise InputError(f"n={n} is not divisible by pattern size {pattern.v}")
        if property_name == "factor" and n > counting_cap(pattern.v):
            raise InputError(
                f"n={n} exceeds the exact-counting cap {counting_cap(pattern.v)}"
            )
        lo, hi = 0.0, 1.0
        probes = []
        violations = 0
        for rnd in range(rounds):
            mid = (lo + hi) / 2.0
            payloads = [
                (pattern, n, mid, property_name, check_chain, derive_seed(seed, n_index, rnd, t))
                for t in range(trials)
            ]
            results = run_trials(_probe_worker, payloads, workers)
            hits = sum(ok for ok, _ in results)
            violations += sum(not chain_ok for _, chain_ok in results)
            w_lo, w_hi = wilson_interval(hits, trials)
            phat = hits / trials
            probes.append(
                {"p": mid, "estimate": phat, "wilson_low": w_lo, "wilson_high": w_hi}
            )
            if phat >= target:
                hi = mid
            else:
                lo = mid
        formula = formula_threshold(pattern, n)["predicted"]
        p_half = (lo + hi) / 2.0
        estimates.append(
            ThresholdEstimate(
                n=n,
                p_half=p_half,
                ci_low=lo,
                ci_high=hi,
                trials_per_probe=trials,
                formula_value=formula,
                ratio=p_half / formula,
                property_name=property_name,
                seed=seed,
                probes=tuple(probes),
                chain_violations=violations,
            )
        )
    return estimates


def _probe_worker(payload) -> tuple[bool, bool]:
    pattern, n, p, property_name, check_chain, seed = payload
    g = sample_gnp(pattern.k, n, p, seed)
    ok = _holds(pattern, g, property_name)
    chain_ok = _chain_consistent(pattern, g) if check_chain else True
    return ok, chain_ok


def _chain_consistent(pattern: PatternGraph, g: HostGraph) -> bool:
    """factor => role coverage => coverage on one host.

    Role coverage implies coverage by construction, so only a host with a
    factor can break the chain.  Hosts beyond the exact-counting caps are
    skipped (factor existence is not computable there).
    """
    if g.n % pattern.v or g.n > counting_cap(pattern.v):
        return True
    if not has_factor(pattern, g):
        return True
    return role_coverage_check(pattern, g) and coverage_check(pattern, g)
