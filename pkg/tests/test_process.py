import math
from fractions import Fraction

import pytest

from hfactor.errors import InputError
from hfactor.factor import FactorCounter
from hfactor.host import complete_host, sample_gnp, total_edges
from hfactor.pattern import complete_pattern, single_edge_pattern
from hfactor.process import gamma, run_process, tail_experiment, verify_martingale_step
from hfactor.rng import derive_seed

K2 = complete_pattern(2)
K3 = complete_pattern(3)
E3 = single_edge_pattern(3)


def test_gamma_values():
    assert gamma(K3, 6, 1) == Fraction(2, 5)
    assert gamma(K3, 6, 6) == Fraction(3, 5)
    assert gamma(K2, 4, 1) == Fraction(1, 3)
    assert gamma(E3, 6, 1) == Fraction(1, 10)


def test_gamma_range():
    with pytest.raises(InputError):
        gamma(K2, 4, 0)
    with pytest.raises(InputError):
        gamma(K2, 4, 7)
    with pytest.raises(InputError):
        gamma(K2, 5, 1)


def test_run_process_immediate_extinction():
    trace = run_process(K3, 3, seed=11)
    assert trace.stop_reason == "extinct"
    assert len(trace.steps) == 1
    step = trace.steps[0]
    assert step.xi == 1 and step.gamma == 1 and step.z == 0
    assert step.log_factor_count == -math.inf
    assert trace.log_initial == pytest.approx(math.log(6))


def test_first_step_fraction_on_complete_host():
    # symmetry: the first deletion always removes the same factor fraction
    for seed in range(5):
        trace = run_process(K2, 4, seed=seed, t_max=1)
        assert trace.steps[0].xi == Fraction(1, 3)


def test_initial_log_count():
    trace = run_process(K2, 8, seed=3, t_max=1)
    assert trace.log_initial == pytest.approx(math.log(math.factorial(8) // math.factorial(4)))


def test_trace_invariants():
    for pat, n in [(K2, 8), (K3, 6), (E3, 6)]:
        for seed in range(6):
            trace = run_process(pat, n, seed=seed)
            prev_log = trace.log_initial
            x_acc = Fraction(0)
            for s in trace.steps:
                assert 0 <= s.xi <= 1
                assert s.log_factor_count <= prev_log + 1e-12
                prev_log = s.log_factor_count
                x_acc += s.z
                assert x_acc == s.x_partial


def test_telescoping_identity():
    for pat, n, seeds in [(K2, 10, range(8)), (K3, 9, range(8))]:
        for seed in seeds:
            trace = run_process(pat, n, seed=seed)
            log_phi = trace.log_initial
            for s in trace.steps:
                if s.xi == 1:
                    break
                log_phi += math.log(1 - s.xi)
                assert abs(log_phi - s.log_factor_count) <= 1e-9


def test_gamma_partial_sums_approximate_log():
    n = 10
    total = total_edges(2, n)
    mnv = Fraction(K2.m * n, K2.v)
    acc = Fraction(0)
    for t in range(1, total):
        acc += gamma(K2, n, t)
        target = float(mnv) * math.log(total / (total - t))
        assert abs(float(acc) - target) <= float(mnv) / (total - t)


def test_step_copy_bound():
    # per-step bound xi <= maxr * (max copies per edge) / (min copy degree),
    # exact whenever the pre-deletion graph has all degrees positive
    for pat, n in [(K2, 10), (K3, 9), (E3, 9)]:
        for seed in range(6):
            trace = run_process(pat, n, seed=seed)
            for s in trace.steps:
                if s.prev_maxr is not None and s.min_copy_degree > 0:
                    bound = s.prev_maxr * Fraction(s.max_copies_per_edge, s.min_copy_degree)
                    assert s.xi <= bound


def test_guard_zeroes_increments():
    trace = run_process(K3, 9, seed=1)
    if trace.guard_trip_step is not None:
        for s in trace.steps:
            if s.i > trace.guard_trip_step:
                assert s.z == 0 and not s.guard_ok


def test_martingale_step_examples():
    left, right = verify_martingale_step(K3, complete_host(2, 6))
    assert left == right == Fraction(2, 5)
    left, right = verify_martingale_step(K2, complete_host(2, 4))
    assert left == right == Fraction(1, 3)
    g = complete_host(2, 4).without_edge((0, 1))
    left, right = verify_martingale_step(K2, g)
    assert left == right == Fraction(2, 5)


def test_martingale_step_random_battery():
    cases = 0
    for pat, n, p in [(K2, 8, 0.6), (K3, 6, 0.8), (E3, 6, 0.7)]:
        for seed in range(40):
            g = sample_gnp(pat.k, n, p, derive_seed(13, seed))
            if FactorCounter(pat, g).count() == 0:
                continue
            left, right = verify_martingale_step(pat, g)
            assert left == right
            cases += 1
            if cases % 3 == 0:
                break
    assert cases >= 3


def test_tail_experiment():
    rep = tail_experiment(K2, 8, trials=200, seed=9, lam=8.0)
    assert rep["exceed_fraction"] == 0.0
    assert len(rep["max_abs_x"]) == 200
    rep3 = tail_experiment(K3, 9, trials=40, seed=9, lam=9.0)
    assert rep3["exceed_fraction"] == 0.0


def test_tail_degenerate():
    rep = tail_experiment(K2, 6, trials=5, seed=1, lam=6.0, t_max=0)
    assert rep["max_abs_x"] == [0.0] * 5


def test_process_validation():
    with pytest.raises(InputError):
        run_process(K3, 7, seed=0)
    with pytest.raises(InputError):
        run_process(K2, 30, seed=0)
