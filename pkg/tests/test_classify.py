"""Recurrence verdicts for maps, chains, and semigroups.

Verdicts never say "not recurrent": the three admissible strings are
"certified", "none-within-horizon", and "skipped". Property tests cover
the inclusion chain between flavors, horizon monotonicity, and the
single-generator consistency between the map and chain classifiers.
"""

import random
from fractions import Fraction as F

import pytest

from semirec.catalogue import build_example
from semirec.classify import (
    CERTIFIED,
    NONE_WITHIN_HORIZON,
    SKIPPED,
    RecurrenceVerdict,
    WindowEstimate,
    classify_chain_point,
    classify_map_point,
    classify_semigroup_point,
    mc_return_sweep,
    r_function,
)
from semirec.geometry import ball
from semirec.markov import MarkovChain
from semirec.semigroup import GeneratorSet


def _single(name):
    (T,) = build_example(name)
    return T


def _chain(name, probs=None):
    gens = build_example(name)
    if probs is None:
        probs = [F(1, len(gens))] * len(gens)
    return MarkovChain(gens, tuple(probs))


# ---------------------------------------------------------------------------
# pinned map verdicts


def test_identity_returns_immediately():
    T = _single("identity")
    v = classify_map_point(T, F(1, 3), F(1, 10), 5)
    assert v.recurrent == CERTIFIED
    assert v.recurrent_time == 1
    assert v.weak == CERTIFIED
    assert v.uniform_estimate.passes


def test_eq2_origin_is_periodic_like():
    # orbit of 0: 1, 1/2, 1/4, ... re-enters ball(0, 1/32) at step 7
    T = _single("eq2-map")
    v = classify_map_point(T, F(0), F(1, 32), 100)
    assert v.recurrent == CERTIFIED
    assert v.recurrent_time == 7
    assert v.uniform_estimate.window == (50, 100)
    assert v.uniform_estimate.value == 51
    assert v.uniform_estimate.passes
    assert v.return_times[0] == 7


def test_eq2_interior_point_never_returns():
    T = _single("eq2-map")
    v = classify_map_point(T, F(1, 3), F(1, 100), 60)
    assert v.recurrent == NONE_WITHIN_HORIZON
    assert v.recurrent_time is None


def test_branch_selection_skips_work():
    T = _single("eq2-map")
    v = classify_map_point(T, F(0), F(1, 32), 100, branches=("recurrent",))
    assert v.recurrent == CERTIFIED
    assert v.weak == SKIPPED
    assert v.uniform_estimate is None
    assert v.weak_uniform_estimate is None


def test_unknown_branch_is_rejected():
    T = _single("identity")
    with pytest.raises(ValueError):
        classify_map_point(T, F(1, 3), F(1, 10), 5, branches=("sometimes",))


def test_verdict_json_shape():
    T = _single("identity")
    data = classify_map_point(T, F(1, 3), F(1, 10), 5).to_json()
    assert data["subject"] == "map"
    assert data["recurrent"] == "certified"
    assert data["x"] == "1/3"
    assert data["eps"] == "1/10"
    est = data["uniform_estimate"]
    assert est["passes"] is True
    assert est["window"] == [2, 5]


# ---------------------------------------------------------------------------
# pinned chain verdicts


def test_example1_chain_weak_but_not_recurrent_at_one():
    Q = _chain("example1")
    v = classify_chain_point(Q, F(1), F(1, 8), 100)
    assert v.recurrent == NONE_WITHIN_HORIZON
    assert v.weak == CERTIFIED
    assert v.weak_time == 1


def test_example2_chain_returns_exactly():
    Q = _chain("example2")
    v = classify_chain_point(Q, F(1, 3), F(1, 64), 12)
    assert v.recurrent == CERTIFIED
    assert v.recurrent_time == 2
    assert v.recurrent_word == (2, 1)


def test_chain_uniform_estimate_is_window_min():
    # from 1/3 the example2 chain returns with mass 1/4 every other step,
    # so the window minimum over [N/2, N] at even N is positive
    Q = _chain("example2")
    v = classify_chain_point(Q, F(1, 3), F(1, 64), 12)
    est = v.uniform_estimate
    assert est.kind == "window-min"
    assert est.window == (6, 12)
    assert est.value > 0


def test_semigroup_point_matches_chain_positivity():
    gens = build_example("example2")
    G = GeneratorSet(gens)
    Q = MarkovChain(gens, (F(1, 2), F(1, 2)))
    for x in (F(1, 3), F(0), F(7, 16)):
        a = classify_semigroup_point(G, (F(1, 2), F(1, 2)), x, F(1, 32), 14)
        b = classify_chain_point(Q, x, F(1, 32), 14)
        assert a.recurrent == b.recurrent
        assert a.recurrent_time == b.recurrent_time
        assert a.subject == "semigroup"


# ---------------------------------------------------------------------------
# property tests


def _random_cases(rng, k):
    names = ("example1", "example2", "example3", "example4", "eq2-map", "doubling")
    for _ in range(k):
        name = names[rng.randrange(len(names))]
        x = F(rng.randint(0, 48), 48)
        eps = F(1, rng.randint(6, 64))
        # two-generator families spread into 2^N distinct orbit points, so
        # keep horizons below the default dedup'd-atom budget
        N = rng.randint(4, 14)
        yield name, x, eps, N


def test_inclusion_chain_on_random_points():
    # uniform-pass implies recurrent certified implies weak certified
    rng = random.Random(61)
    for name, x, eps, N in _random_cases(rng, 40):
        Q = _chain(name)
        v = classify_chain_point(Q, x, eps, N)
        if v.uniform_estimate is not None and v.uniform_estimate.passes:
            assert v.recurrent == CERTIFIED
        if v.recurrent == CERTIFIED:
            assert v.weak == CERTIFIED
            assert v.weak_time <= v.recurrent_time


def test_horizon_monotonicity():
    rng = random.Random(62)
    for name, x, eps, N in _random_cases(rng, 12):
        N = min(N, 10)
        Q = _chain(name)
        small = classify_chain_point(Q, x, eps, N, branches=("recurrent",))
        big = classify_chain_point(Q, x, eps, N + 4, branches=("recurrent",))
        if small.recurrent == CERTIFIED:
            assert big.recurrent == CERTIFIED
            assert big.recurrent_time == small.recurrent_time


def test_single_generator_map_chain_consistency():
    rng = random.Random(63)
    for name in ("eq2-map", "example1", "doubling", "identity"):
        (T,) = build_example(name)
        Q = MarkovChain((T,), (F(1),))
        for _ in range(8):
            x = F(rng.randint(0, 36), 36)
            eps = F(1, rng.randint(6, 50))
            N = rng.randint(4, 16)
            vm = classify_map_point(T, x, eps, N, branches=("recurrent",))
            vc = classify_chain_point(Q, x, eps, N, branches=("recurrent",))
            assert vm.recurrent == vc.recurrent, (name, str(x), str(eps), N)
            assert vm.recurrent_time == vc.recurrent_time


def test_return_times_are_within_horizon_and_sorted():
    rng = random.Random(64)
    for name, x, eps, N in _random_cases(rng, 20):
        Q = _chain(name)
        v = classify_chain_point(Q, x, eps, N, branches=("recurrent", "uniform"))
        times = v.return_times
        assert list(times) == sorted(times)
        assert all(1 <= t <= N for t in times)
        if v.recurrent == CERTIFIED:
            assert times[0] == v.recurrent_time


# ---------------------------------------------------------------------------
# the infimum-gap bracket


def test_r_bracket_example1_interior():
    (T,) = build_example("example1")
    lo, hi = r_function(T, F(1, 4), 50, r_tol=F(1, 2**16))
    assert lo <= F(1, 12) <= hi
    assert hi - lo <= F(1, 2**16)


def test_r_bracket_example1_origin():
    (T,) = build_example("example1")
    lo, hi = r_function(T, F(0), 50, r_tol=F(1, 2**16))
    assert lo == 0
    assert hi <= F(1, 2**16)


def test_r_bracket_identity_is_zero():
    (T,) = build_example("identity")
    lo, hi = r_function(T, F(1, 2), 10, r_tol=F(1, 64))
    assert lo == 0
    assert hi <= F(1, 64)


# ---------------------------------------------------------------------------
# Monte Carlo mode


def test_mc_chain_verdict_is_reproducible():
    Q = _chain("example2")
    a = classify_chain_point(Q, F(1, 3), F(1, 64), 200, mode="mc", seed=5, samples=60)
    b = classify_chain_point(Q, F(1, 3), F(1, 64), 200, mode="mc", seed=5, samples=60)
    assert a.to_json() == b.to_json()
    assert a.mode == "mc" and a.seed == 5 and a.samples == 60


def test_mc_verdict_shape():
    Q = _chain("example2")
    v = classify_chain_point(Q, F(1, 3), F(1, 64), 100, mode="mc", seed=9, samples=40)
    # sampling cannot certify weak recurrence and never reports exact masses
    assert v.weak == SKIPPED
    assert v.uniform_estimate is None
    assert v.recurrent in (CERTIFIED, NONE_WITHIN_HORIZON)


def test_mc_finds_the_exact_return():
    # the 2-cycle at 1/3 has probability 1/4 per period, so 60 trials of
    # length 100 miss it with probability well under 1e-30
    Q = _chain("example2")
    v = classify_chain_point(Q, F(1, 3), F(1, 64), 100, mode="mc", seed=11, samples=60)
    assert v.recurrent == CERTIFIED


def test_mc_sweep_shares_words_across_points():
    Q = _chain("example2")
    pts = [F(j, 8) for j in range(1, 8)]
    out = mc_return_sweep(Q, pts, F(1, 32), 60, seed=13, samples=50)
    assert len(out) == len(pts)
    for hit in out:
        if hit is not None:
            trial, time = hit
            assert 0 <= trial < 50 and 1 <= time <= 60
    # deterministic replay
    again = mc_return_sweep(Q, pts, F(1, 32), 60, seed=13, samples=50)
    assert out == again


def test_map_mode_rejects_mc():
    T = _single("eq2-map")
    with pytest.raises(TypeError):
        classify_map_point(T, F(0), F(1, 32), 10, mode="mc")


# ---------------------------------------------------------------------------
# estimates as data


def test_window_estimate_json():
    est = WindowEstimate((5, 10), F(1, 8), F(1, 1000), True, "window-min-mass")
    data = est.to_json()
    assert data == {
        "window": [5, 10],
        "value": "1/8",
        "threshold": "1/1000",
        "passes": True,
        "kind": "window-min-mass",
    }


def test_verdict_rejects_bad_inputs():
    T = _single("identity")
    with pytest.raises(ValueError):
        classify_map_point(T, F(1, 3), F(0), 5)
    with pytest.raises(ValueError):
        classify_map_point(T, F(1, 3), F(1, 10), 0)
